//! Fourier multipliers and pseudo-spectral products.

use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use super::field::{SpectralField, VelocityState};
use super::grid::{Axis, Grid};
use crate::error::{Error, Result};

/// Relative ξ_h = 0 content above which the inverse horizontal Laplacian
/// refuses its input.
pub const HORIZONTAL_MEAN_TOL: f64 = 1e-12;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Derivative wavenumber tables `(k1, k2, k3)`.
pub(crate) fn deriv_tables(g: Grid) -> [Vec<f64>; 3] {
    Axis::ALL.map(|a| g.deriv_wavenumbers(a))
}

/// `∂_axis f`: multiplication by `i·ξ_axis`.
pub fn derivative(f: &SpectralField, axis: Axis) -> SpectralField {
    let k = f.grid().deriv_wavenumbers(axis);
    match axis {
        Axis::X1 => f.mapped(|a, _, _| I * k[a]),
        Axis::X2 => f.mapped(|_, b, _| I * k[b]),
        Axis::X3 => f.mapped(|_, _, c| I * k[c]),
    }
}

/// `∇ʰ f = (∂₁f, ∂₂f)`.
pub fn horizontal_gradient(f: &SpectralField) -> [SpectralField; 2] {
    [derivative(f, Axis::X1), derivative(f, Axis::X2)]
}

/// `Δ_h f`.
pub fn horizontal_laplacian(f: &SpectralField) -> SpectralField {
    let [k1, k2, _] = deriv_tables(f.grid());
    f.scaled_by(|a, b, _| -(k1[a] * k1[a] + k2[b] * k2[b]))
}

/// Relative size of the coefficients with `ξ_h = 0`.
pub fn horizontal_mean_content(f: &SpectralField) -> f64 {
    let total = f.coeff_energy();
    if total == 0.0 {
        return 0.0;
    }
    let n_v = f.grid().n_v();
    let plane: f64 = f.coeffs()[..n_v].iter().map(|c| c.norm_sqr()).sum();
    (plane / total).sqrt()
}

/// `Δ_h⁻¹ f` on fields without `ξ_h = 0` content.
pub fn inverse_horizontal_laplacian(f: &SpectralField) -> Result<SpectralField> {
    let content = horizontal_mean_content(f);
    if content > HORIZONTAL_MEAN_TOL {
        return Err(Error::HorizontalMean { content });
    }
    Ok(inverse_horizontal_laplacian_unchecked(f))
}

/// `Δ_h⁻¹` with the `ξ_h = 0` plane mapped to zero.
pub fn inverse_horizontal_laplacian_unchecked(f: &SpectralField) -> SpectralField {
    let [k1, k2, _] = deriv_tables(f.grid());
    f.scaled_by(|a, b, _| {
        let kh2 = k1[a] * k1[a] + k2[b] * k2[b];
        if kh2 == 0.0 {
            0.0
        } else {
            -1.0 / kh2
        }
    })
}

/// Spectral divergence of a vector field.
pub fn divergence(v: &[SpectralField; 3]) -> SpectralField {
    let g = v[0].grid();
    let [k1, k2, k3] = deriv_tables(g);
    let (n_h, n_v) = (g.n_h(), g.n_v());
    let mut out = SpectralField::zeros(g);
    let (c0, c1, c2) = (v[0].coeffs(), v[1].coeffs(), v[2].coeffs());
    out.coeffs_mut()
        .par_chunks_mut(n_h * n_v)
        .enumerate()
        .for_each(|(a, plane)| {
            for b in 0..n_h {
                for c in 0..n_v {
                    let idx = g.index(a, b, c);
                    plane[b * n_v + c] =
                        I * (c0[idx] * k1[a] + c1[idx] * k2[b] + c2[idx] * k3[c]);
                }
            }
        });
    out
}

/// Largest divergence coefficient relative to the largest
/// `|ξ|·|û|` product; zero for the zero field.
pub fn relative_divergence(v: &[SpectralField; 3]) -> f64 {
    let g = v[0].grid();
    let [k1, k2, k3] = deriv_tables(g);
    let div = divergence(v);
    let mut scale = 0.0f64;
    for idx in 0..g.n_points() {
        let (a, b, c) = g.unravel(idx);
        let kn = (k1[a] * k1[a] + k2[b] * k2[b] + k3[c] * k3[c]).sqrt();
        let un = (v[0].coeffs()[idx].norm_sqr()
            + v[1].coeffs()[idx].norm_sqr()
            + v[2].coeffs()[idx].norm_sqr())
        .sqrt();
        scale = scale.max(kn * un);
    }
    if scale == 0.0 {
        0.0
    } else {
        div.max_coeff() / scale
    }
}

/// Leray projection `û − ξ(ξ·û)/|ξ|²`.
pub fn leray_project(v: &[SpectralField; 3]) -> [SpectralField; 3] {
    let mut out = v.clone();
    leray_project_in_place(&mut out);
    out
}

/// [`leray_project`] wrapped into a state at time `t`.
pub fn leray_project_state(v: &[SpectralField; 3], t: f64) -> Result<VelocityState> {
    VelocityState::new(leray_project(v), t)
}

pub fn leray_project_in_place(v: &mut [SpectralField; 3]) {
    let g = v[0].grid();
    assert!(v.iter().all(|c| c.grid() == g), "projection across grids");
    let [k1, k2, k3] = deriv_tables(g);
    let (n_h, n_v) = (g.n_h(), g.n_v());
    let [v0, v1, v2] = v;
    v0.coeffs_mut()
        .par_chunks_mut(n_h * n_v)
        .zip(v1.coeffs_mut().par_chunks_mut(n_h * n_v))
        .zip(v2.coeffs_mut().par_chunks_mut(n_h * n_v))
        .enumerate()
        .for_each(|(a, ((p0, p1), p2))| {
            for b in 0..n_h {
                for c in 0..n_v {
                    let k = [k1[a], k2[b], k3[c]];
                    let k2n = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
                    if k2n == 0.0 {
                        continue;
                    }
                    let i = b * n_v + c;
                    let dot = (p0[i] * k[0] + p1[i] * k[1] + p2[i] * k[2]) / k2n;
                    p0[i] -= dot * k[0];
                    p1[i] -= dot * k[1];
                    p2[i] -= dot * k[2];
                }
            }
        });
}

/// 2D Leray projection acting on the horizontal components only.
pub fn horizontal_leray_project(v: &mut [SpectralField; 2]) {
    let g = v[0].grid();
    let [k1, k2, _] = deriv_tables(g);
    let (n_h, n_v) = (g.n_h(), g.n_v());
    let [v0, v1] = v;
    v0.coeffs_mut()
        .par_chunks_mut(n_h * n_v)
        .zip(v1.coeffs_mut().par_chunks_mut(n_h * n_v))
        .enumerate()
        .for_each(|(a, (p0, p1))| {
            for b in 0..n_h {
                let k2n = k1[a] * k1[a] + k2[b] * k2[b];
                if k2n == 0.0 {
                    continue;
                }
                for c in 0..n_v {
                    let i = b * n_v + c;
                    let dot = (p0[i] * k1[a] + p1[i] * k2[b]) / k2n;
                    p0[i] -= dot * k1[a];
                    p1[i] -= dot * k2[b];
                }
            }
        });
}

/// 2/3-rule truncation.
pub fn dealias(f: &SpectralField) -> SpectralField {
    let mut out = f.clone();
    dealias_in_place(&mut out);
    out
}

pub fn dealias_in_place(f: &mut SpectralField) {
    let g = f.grid();
    let keep_h = g.dealias_keep(Axis::X1);
    let keep_v = g.dealias_keep(Axis::X3);
    let (n_h, n_v) = (g.n_h(), g.n_v());
    f.coeffs_mut()
        .par_chunks_mut(n_h * n_v)
        .enumerate()
        .for_each(|(a, plane)| {
            for b in 0..n_h {
                for c in 0..n_v {
                    if !(keep_h[a] && keep_h[b] && keep_v[c]) {
                        plane[b * n_v + c] = Complex64::default();
                    }
                }
            }
        });
}

/// True when every coefficient outside the 2/3 set is exactly zero.
pub fn is_dealiased(f: &SpectralField) -> bool {
    let g = f.grid();
    let keep_h = g.dealias_keep(Axis::X1);
    let keep_v = g.dealias_keep(Axis::X3);
    f.coeffs().iter().enumerate().all(|(idx, c)| {
        let (a, b, d) = g.unravel(idx);
        (keep_h[a] && keep_h[b] && keep_v[d]) || *c == Complex64::default()
    })
}

/// Pointwise product on the grid, no truncation.
pub fn raw_product(a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
    a.ensure_same_grid(b)?;
    let pa = a.to_physical();
    let pb = b.to_physical();
    let prod: Vec<f64> = pa.iter().zip(&pb).map(|(x, y)| x * y).collect();
    SpectralField::from_physical(a.grid(), &prod)
}

/// Pseudo-spectral product followed by 2/3 truncation.
pub fn product(a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
    let mut p = raw_product(a, b)?;
    dealias_in_place(&mut p);
    Ok(p)
}

/// Dealiased products of physical sample arrays, transformed back.
pub(crate) fn forward_dealiased(grid: Grid, samples: &[f64]) -> SpectralField {
    let mut f = SpectralField::from_physical(grid, samples).expect("sample count matches grid");
    dealias_in_place(&mut f);
    f
}

/// `(v·∇)f` for a vector field `v` and scalar `f`, dealiased.
pub fn advect(v: &[SpectralField], f: &SpectralField) -> Result<SpectralField> {
    let g = f.grid();
    let mut acc = vec![0.0; g.n_points()];
    for (axis, vi) in Axis::ALL.iter().zip(v) {
        vi.ensure_same_grid(f)?;
        let dv = derivative(f, *axis).to_physical();
        let pv = vi.to_physical();
        acc.par_iter_mut()
            .zip(pv.par_iter().zip(dv.par_iter()))
            .for_each(|(o, (x, y))| *o += x * y);
    }
    Ok(forward_dealiased(g, &acc))
}

/// `[f]_ε` with `ε = 2^-m`: the coefficients relabeled on the grid whose
/// vertical period is `2^m` times longer.
pub fn slowly_varying_embed(f: &SpectralField, m: u32) -> Result<SpectralField> {
    let g = f.grid();
    if g.stretch() != 0 {
        return Err(Error::InvalidArgument(format!(
            "embedding expects a unit-period field, got stretch {}",
            g.stretch()
        )));
    }
    let target = Grid::new(g.n_h(), g.n_v(), m)?;
    f.clone().relabel(target)
}

/// Stretch exponent `m` for `ε = 2^-m`.
pub fn stretch_exponent(eps: f64) -> Result<u32> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::NonDyadicStretch(eps));
    }
    let m = -eps.log2();
    let mr = m.round();
    if (m - mr).abs() > 1e-12 || (-mr).exp2() != eps {
        return Err(Error::NonDyadicStretch(eps));
    }
    Ok(mr as u32)
}
