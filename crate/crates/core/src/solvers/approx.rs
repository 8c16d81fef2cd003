//! Building the approximate solution `u_app = [uʰ + εwʰ, w³]_ε` and the
//! quantities it leaves behind: pressures, the forcing `Fᵉ` and the defect
//! of the reconstructed `wʰ` in its own momentum equation.

use super::stepping::Trajectory;
use super::transport::ApproxSnapshot;
use crate::error::{Error, Result};
use crate::spectral::ops::{deriv_tables, horizontal_laplacian};
use crate::spectral::{
    advect, derivative, product, slowly_varying_embed, Axis, SpectralField, VelocityState,
};

/// Relative content of `∂₃w³` where the discrete horizontal gradient
/// vanishes, above which reconstruction is refused.
pub const RECONSTRUCT_TOL: f64 = 1e-12;

/// `wʰ = −∇ʰ Δ_h⁻¹ ∂₃w³`, so that `(wʰ, w³)` is divergence free.
pub fn reconstruct_wh(w3: &SpectralField) -> Result<[SpectralField; 2]> {
    let g = w3.grid();
    let [k1, k2, k3] = deriv_tables(g);
    let (mut bad, mut total) = (0.0, 0.0);
    for (idx, c) in w3.coeffs().iter().enumerate() {
        let (a, b, d) = g.unravel(idx);
        let e = k3[d] * k3[d] * c.norm_sqr();
        total += e;
        if k1[a] == 0.0 && k2[b] == 0.0 {
            bad += e;
        }
    }
    if total > 0.0 && (bad / total).sqrt() > RECONSTRUCT_TOL {
        return Err(Error::HorizontalMean {
            content: (bad / total).sqrt(),
        });
    }
    let comp = |k: &[f64], horizontal: fn(usize, usize) -> usize| {
        w3.scaled_by(|a, b, d| {
            let kh2 = k1[a] * k1[a] + k2[b] * k2[b];
            if kh2 == 0.0 {
                0.0
            } else {
                -k[horizontal(a, b)] * k3[d] / kh2
            }
        })
    };
    Ok([comp(&k1, |a, _| a), comp(&k2, |_, b| b)])
}

/// Per-slice pressures of the approximate solution.
#[derive(Debug, Clone, PartialEq)]
pub struct PressureFields {
    pub p0: SpectralField,
    pub p1h: SpectralField,
    pub p13: SpectralField,
}

impl PressureFields {
    pub fn p1(&self) -> SpectralField {
        &self.p1h + &self.p13
    }
}

/// `Σ ∂_i∂_j(−Δ_h)⁻¹(aⁱbʲ)` over the listed pairs, with `axis` giving the
/// derivative direction of each factor index.
fn pressure_sum(terms: &[(&SpectralField, &SpectralField, Axis, Axis)]) -> Result<SpectralField> {
    let g = terms[0].0.grid();
    let [k1, k2, k3] = deriv_tables(g);
    let k = |axis: Axis| match axis {
        Axis::X1 => &k1,
        Axis::X2 => &k2,
        Axis::X3 => &k3,
    };
    let mut out = SpectralField::zeros(g);
    for &(a, b, ia, ib) in terms {
        let (ka, kb) = (k(ia), k(ib));
        let p = product(a, b)?.scaled_by(|x, y, z| {
            let kh2 = k1[x] * k1[x] + k2[y] * k2[y];
            if kh2 == 0.0 {
                return 0.0;
            }
            let idx = [x, y, z];
            -ka[idx[ia.index()]] * kb[idx[ib.index()]] / kh2
        });
        out += &p;
    }
    Ok(out)
}

/// `p₀ = Σ_{i,j≤2} ∂_i∂_j(−Δ_h)⁻¹(uⁱuʲ)`.
pub fn compute_p0(uh: &[SpectralField; 2]) -> Result<SpectralField> {
    let [u1, u2] = uh;
    pressure_sum(&[
        (u1, u1, Axis::X1, Axis::X1),
        (u1, u2, Axis::X1, Axis::X2),
        (u2, u1, Axis::X2, Axis::X1),
        (u2, u2, Axis::X2, Axis::X2),
    ])
}

/// `(p₁,ₕ, p₁,₃)` with `p₁,ₕ = Σ_{i,j≤2} ∂_i∂_j(−Δ_h)⁻¹(uⁱwʲ)` and
/// `p₁,₃ = Σ_{i≤2} ∂_i∂₃(−Δ_h)⁻¹(uⁱw³)`.
pub fn compute_p1(uh: &[SpectralField; 2], w: &[SpectralField; 3]) -> Result<(SpectralField, SpectralField)> {
    let [u1, u2] = uh;
    let [w1, w2, w3] = w;
    let p1h = pressure_sum(&[
        (u1, w1, Axis::X1, Axis::X1),
        (u1, w2, Axis::X1, Axis::X2),
        (u2, w1, Axis::X2, Axis::X1),
        (u2, w2, Axis::X2, Axis::X2),
    ])?;
    let p13 = pressure_sum(&[(u1, w3, Axis::X1, Axis::X3), (u2, w3, Axis::X2, Axis::X3)])?;
    Ok((p1h, p13))
}

pub fn compute_pressures(uh: &[SpectralField; 2], w3: &SpectralField) -> Result<PressureFields> {
    let [wh1, wh2] = reconstruct_wh(w3)?;
    let p0 = compute_p0(uh)?;
    let (p1h, p13) = compute_p1(uh, &[wh1, wh2, w3.clone()])?;
    Ok(PressureFields { p0, p1h, p13 })
}

fn eps_of(m: u32) -> f64 {
    (-(m as f64)).exp2()
}

/// `[uʰ + εwʰ, w³]_ε` at time `t`.
pub fn assemble_uapp(uh: &[SpectralField; 2], w3: &SpectralField, m: u32, t: f64) -> Result<VelocityState> {
    let eps = eps_of(m);
    let wh = reconstruct_wh(w3)?;
    let h = |i: usize| {
        let mut v = uh[i].clone();
        v.axpy(eps, &wh[i]);
        slowly_varying_embed(&v, m)
    };
    VelocityState::new([h(0)?, h(1)?, slowly_varying_embed(w3, m)?], t)
}

pub fn assemble_uapp_trajectory(traj: &Trajectory<ApproxSnapshot>, m: u32) -> Result<Trajectory<VelocityState>> {
    let mut out = Trajectory::default();
    for (&t, s) in traj.times.iter().zip(&traj.states) {
        out.push(t, assemble_uapp(&s.uh, &s.w3, m, t)?);
    }
    Ok(out)
}

/// `∂_t w³ = Δ_h w³ − uʰ·∇ʰw³`.
pub fn w3_time_derivative(uh: &[SpectralField; 2], w3: &SpectralField) -> Result<SpectralField> {
    let mut d = horizontal_laplacian(w3);
    d -= &advect(uh, w3)?;
    Ok(d)
}

/// `D = ∂_t wʰ + uʰ·∇ʰwʰ − Δ_h wʰ + ∇ʰp₁`, the amount by which the
/// reconstructed `wʰ` misses the horizontal momentum equation of the
/// linear system. Unit-period grid, not embedded.
pub fn wh_momentum_defect(uh: &[SpectralField; 2], w3: &SpectralField) -> Result<[SpectralField; 2]> {
    let wh = reconstruct_wh(w3)?;
    let dt_wh = reconstruct_wh(&w3_time_derivative(uh, w3)?)?;
    let (p1h, p13) = compute_p1(uh, &[wh[0].clone(), wh[1].clone(), w3.clone()])?;
    let p1 = &p1h + &p13;
    let mut out: Vec<SpectralField> = Vec::with_capacity(2);
    for (i, axis) in [Axis::X1, Axis::X2].into_iter().enumerate() {
        let mut d = dt_wh[i].clone();
        d += &advect(uh, &wh[i])?;
        d -= &horizontal_laplacian(&wh[i]);
        d += &derivative(&p1, axis);
        out.push(d);
    }
    Ok(out.try_into().expect("two components"))
}

/// `Fᵉ` on the stretched grid, from unit-period profiles:
/// `ε[w·∇wʰ]_ε + [w·∇uʰ]_ε` horizontally and `[w·∇w³ + ∂₃(p₀ + εp₁)]_ε`
/// vertically.
pub fn compute_forcing_f(
    uh: &[SpectralField; 2],
    w: &[SpectralField; 3],
    p0: &SpectralField,
    p1: &SpectralField,
    m: u32,
) -> Result<[SpectralField; 3]> {
    let eps = eps_of(m);
    let mut out: Vec<SpectralField> = Vec::with_capacity(3);
    for i in 0..2 {
        let mut f = advect(w, &uh[i])?;
        f.axpy(eps, &advect(w, &w[i])?);
        out.push(slowly_varying_embed(&f, m)?);
    }
    let mut p = p0.clone();
    p.axpy(eps, p1);
    let mut f3 = advect(w, &w[2])?;
    f3 += &derivative(&p, Axis::X3);
    out.push(slowly_varying_embed(&f3, m)?);
    Ok(out.try_into().expect("three components"))
}

/// Right-hand side `εFᵉ + ε[(D, 0)]_ε` of the equation satisfied by
/// `u_app`, modulo a gradient.
pub fn uapp_forcing(snap: &ApproxSnapshot, m: u32) -> Result<[SpectralField; 3]> {
    let eps = eps_of(m);
    let pr = compute_pressures(&snap.uh, &snap.w3)?;
    let [wh1, wh2] = reconstruct_wh(&snap.w3)?;
    let w = [wh1, wh2, snap.w3.clone()];
    let mut f = compute_forcing_f(&snap.uh, &w, &pr.p0, &pr.p1(), m)?;
    let d = wh_momentum_defect(&snap.uh, &snap.w3)?;
    for (fi, di) in f.iter_mut().zip(&d) {
        fi.axpy(1.0, &slowly_varying_embed(di, m)?);
    }
    f.iter_mut().for_each(|c| c.scale(eps));
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{relative_divergence, Grid};

    #[test]
    fn single_mode_reconstruction() {
        let g = Grid::new(8, 8, 0).unwrap();
        let w3 = SpectralField::from_fn(g, |x, _, z| x.sin() * z.sin());
        let [a, b] = reconstruct_wh(&w3).unwrap();
        let expect = SpectralField::from_fn(g, |x, _, z| x.cos() * z.cos());
        assert!(a.max_coeff_diff(&expect) < 1e-15);
        assert!(b.max_coeff() < 1e-15);
    }

    #[test]
    fn x3_independent_w3_gives_zero() {
        let g = Grid::new(8, 8, 0).unwrap();
        let w3 = SpectralField::from_fn(g, |x, y, _| (x - y).cos());
        let wh = reconstruct_wh(&w3).unwrap();
        assert!(wh.iter().all(|c| c.max_coeff() == 0.0));
    }

    #[test]
    fn vertical_shear_refused() {
        let g = Grid::new(8, 8, 0).unwrap();
        let w3 = SpectralField::from_fn(g, |x, _, z| x.sin() + z.cos());
        assert!(matches!(reconstruct_wh(&w3), Err(Error::HorizontalMean { .. })));
    }

    #[test]
    fn embedded_uapp_is_divergence_free() {
        let g = Grid::new(8, 8, 0).unwrap();
        let uh = [
            SpectralField::from_fn(g, |x, y, z| x.cos() * y.sin() * z.cos()),
            SpectralField::from_fn(g, |x, y, z| -x.sin() * y.cos() * z.cos()),
        ];
        let w3 = SpectralField::from_fn(g, |x, y, z| (x + 2.0 * y).sin() * (2.0 * z).cos());
        for m in 0..4 {
            let u = assemble_uapp(&uh, &w3, m, 0.0).unwrap();
            assert!(relative_divergence(&u.components) < 1e-14);
            assert_eq!(u.grid().stretch(), m);
        }
    }
}
