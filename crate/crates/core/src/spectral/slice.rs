//! Fields stored per vertical slice: Fourier in `x_h`, physical in `x₃`.
//!
//! Every operation acts on each slice separately with identical code, so a
//! slice's result never depends on its neighbours.

use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use super::fft;
use super::field::SpectralField;
use super::grid::{Axis, Grid};
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq)]
pub struct SliceField {
    grid: Grid,
    data: Vec<Complex64>,
}

impl SliceField {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            data: vec![Complex64::default(); grid.n_points()],
        }
    }

    pub fn from_spectral(f: &SpectralField) -> Self {
        let mut data = f.coeffs().to_vec();
        fft::inverse(&mut data, f.grid().dims(), &[2]);
        Self { grid: f.grid(), data }
    }

    pub fn to_spectral(&self) -> SpectralField {
        let mut data = self.data.clone();
        fft::forward(&mut data, self.grid.dims(), &[2]);
        SpectralField::from_coeffs(self.grid, data).expect("same layout")
    }

    /// Horizontal transform of real samples in storage order.
    pub fn from_physical(grid: Grid, samples: &[f64]) -> Result<Self> {
        if samples.len() != grid.n_points() {
            return Err(Error::DimensionMismatch {
                expected: grid.n_points(),
                actual: samples.len(),
            });
        }
        let mut data: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        fft::forward(&mut data, grid.dims(), &fft::HORIZONTAL_AXES);
        Ok(Self { grid, data })
    }

    pub fn to_physical(&self) -> Vec<f64> {
        let mut data = self.data.clone();
        fft::inverse(&mut data, self.grid.dims(), &fft::HORIZONTAL_AXES);
        data.into_par_iter().map(|c| c.re).collect()
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// Horizontal Fourier coefficients of slice `i3`, `[i1][i2]` order.
    pub fn slice(&self, i3: usize) -> Vec<Complex64> {
        let n_v = self.grid.n_v();
        self.data.iter().skip(i3).step_by(n_v).copied().collect()
    }

    /// Reorders slices: output slice `k` is input slice `perm[k]`.
    pub fn permute_slices(&self, perm: &[usize]) -> Result<Self> {
        let n_v = self.grid.n_v();
        let mut seen = vec![false; n_v];
        if perm.len() != n_v || perm.iter().any(|&p| p >= n_v || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidArgument("not a permutation of the slices".into()));
        }
        let mut out = Self::zeros(self.grid);
        for (col, src) in out.data.chunks_mut(n_v).zip(self.data.chunks(n_v)) {
            for (k, &p) in perm.iter().enumerate() {
                col[k] = src[p];
            }
        }
        Ok(out)
    }

    /// Multiplies by a horizontal symbol `m(i1, i2)`.
    pub fn apply(&mut self, m: impl Fn(usize, usize) -> Complex64 + Sync) {
        let (n_h, n_v) = (self.grid.n_h(), self.grid.n_v());
        self.data
            .par_chunks_mut(n_h * n_v)
            .enumerate()
            .for_each(|(a, plane)| {
                for (b, col) in plane.chunks_mut(n_v).enumerate() {
                    let s = m(a, b);
                    col.iter_mut().for_each(|c| *c *= s);
                }
            });
    }

    pub fn mapped(&self, m: impl Fn(usize, usize) -> Complex64 + Sync) -> Self {
        let mut out = self.clone();
        out.apply(m);
        out
    }

    pub fn axpy(&mut self, alpha: f64, x: &Self) {
        self.data
            .par_iter_mut()
            .zip(x.data.par_iter())
            .for_each(|(y, x)| *y += x * alpha);
    }

    /// `self += m(ξ_h)·x`.
    pub fn axpy_complex(&mut self, x: &Self, m: impl Fn(usize, usize) -> Complex64 + Sync) {
        let (n_h, n_v) = (self.grid.n_h(), self.grid.n_v());
        self.data
            .par_chunks_mut(n_h * n_v)
            .zip(x.data.par_chunks(n_h * n_v))
            .enumerate()
            .for_each(|(a, (plane, xp))| {
                for (b, (col, xc)) in plane.chunks_mut(n_v).zip(xp.chunks(n_v)).enumerate() {
                    let s = m(a, b);
                    col.iter_mut().zip(xc).for_each(|(c, x)| *c += s * x);
                }
            });
    }

    pub fn scale(&mut self, alpha: f64) {
        self.data.par_iter_mut().for_each(|c| *c *= alpha);
    }

    /// `∂_axis` for a horizontal axis.
    pub fn derivative(&self, axis: Axis) -> Self {
        let k = self.grid.deriv_wavenumbers(axis);
        match axis {
            Axis::X1 => self.mapped(|a, _| I * k[a]),
            Axis::X2 => self.mapped(|_, b| I * k[b]),
            Axis::X3 => panic!("slice fields have no vertical derivative"),
        }
    }

    /// Horizontal 2/3-rule truncation.
    pub fn dealias_in_place(&mut self) {
        let keep = self.grid.dealias_keep(Axis::X1);
        self.apply(|a, b| {
            if keep[a] && keep[b] {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::default()
            }
        });
    }

    /// `Σ_slices Σ_k |c|²`, times the box volume over the slice count: the
    /// L² norm squared in the box when the vertical samples are equispaced.
    pub fn l2_norm(&self) -> f64 {
        let g = self.grid;
        let e: f64 = self.data.iter().map(|c| c.norm_sqr()).sum();
        (e * g.volume() / g.n_v() as f64).sqrt()
    }
}

/// 2D Leray projection of a horizontal pair, slice by slice.
pub fn slice_leray_project(v: &mut [SliceField; 2]) {
    let g = v[0].grid();
    let k1 = g.deriv_wavenumbers(Axis::X1);
    let k2 = g.deriv_wavenumbers(Axis::X2);
    let (n_h, n_v) = (g.n_h(), g.n_v());
    let [v0, v1] = v;
    v0.data
        .par_chunks_mut(n_h * n_v)
        .zip(v1.data.par_chunks_mut(n_h * n_v))
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
