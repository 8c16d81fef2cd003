use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use super::fft;
use super::grid::{signed_index, storage_index, Axis, Grid};
use crate::error::{Error, Result};

/// Fourier coefficients of a real scalar field on a [`Grid`].
///
/// The forward transform divides by the point count, so `coeffs[0]` is the
/// mean and `‖f‖²_{L²} = volume · Σ|c_k|²`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::default(); grid.n_points()],
        }
    }

    pub fn from_coeffs(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.n_points() {
            return Err(Error::DimensionMismatch {
                expected: grid.n_points(),
                actual: coeffs.len(),
            });
        }
        Ok(Self { grid, coeffs })
    }

    /// Forward transform of real samples in storage order.
    pub fn from_physical(grid: Grid, samples: &[f64]) -> Result<Self> {
        if samples.len() != grid.n_points() {
            return Err(Error::DimensionMismatch {
                expected: grid.n_points(),
                actual: samples.len(),
            });
        }
        let mut coeffs: Vec<Complex64> =
            samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        fft::forward(&mut coeffs, grid.dims(), &fft::ALL_AXES);
        Ok(Self { grid, coeffs })
    }

    /// Samples `f(x1, x2, x3)` on the grid and transforms.
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64, f64) -> f64 + Sync) -> Self {
        let samples = sample_fn(grid, f);
        Self::from_physical(grid, &samples).expect("sample count matches grid")
    }

    /// Physical samples (real part of the inverse transform).
    pub fn to_physical(&self) -> Vec<f64> {
        let mut work = self.coeffs.clone();
        fft::inverse(&mut work, self.grid.dims(), &fft::ALL_AXES);
        work.into_par_iter().map(|c| c.re).collect()
    }

    /// The same trigonometric polynomial on a grid refined by `factor` (a
    /// power of two) in every direction, by zero padding. Nyquist
    /// coefficients are split evenly between the two padded slots so the
    /// result stays real.
    pub fn zero_padded(&self, factor: usize) -> SpectralField {
        assert!(factor.is_power_of_two(), "refinement factor must be a power of two");
        let g = self.grid;
        let fine = Grid::new(g.n_h() * factor, g.n_v() * factor, g.stretch())
            .expect("refined grid is valid");
        if factor == 1 {
            return self.clone();
        }
        let mut padded = vec![Complex64::default(); fine.n_points()];
        let targets = |i: usize, n: usize, nf: usize| -> Vec<(usize, f64)> {
            let k = signed_index(i, n);
            if k == -(n as i64) / 2 {
                vec![(storage_index(k, nf), 0.5), (storage_index(-k, nf), 0.5)]
            } else {
                vec![(storage_index(k, nf), 1.0)]
            }
        };
        let t1: Vec<_> = (0..g.n_h()).map(|i| targets(i, g.n_h(), fine.n_h())).collect();
        let t3: Vec<_> = (0..g.n_v()).map(|i| targets(i, g.n_v(), fine.n_v())).collect();
        for (idx, &c) in self.coeffs.iter().enumerate() {
            if c == Complex64::default() {
                continue;
            }
            let (i1, i2, i3) = g.unravel(idx);
            for &(a, wa) in &t1[i1] {
                for &(b, wb) in &t1[i2] {
                    for &(d, wd) in &t3[i3] {
                        padded[fine.index(a, b, d)] += c * (wa * wb * wd);
                    }
                }
            }
        }
        SpectralField {
            grid: fine,
            coeffs: padded,
        }
    }

    /// Physical samples on the refined grid of [`SpectralField::zero_padded`].
    pub fn to_physical_refined(&self, factor: usize) -> (Grid, Vec<f64>) {
        let fine = self.zero_padded(factor);
        (fine.grid, fine.to_physical())
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient of the integer mode `(k1, k2, k3)` (FFT index convention).
    pub fn mode(&self, k1: i64, k2: i64, k3: i64) -> Complex64 {
        let g = self.grid;
        self.coeffs[g.index(
            storage_index(k1, g.n_h()),
            storage_index(k2, g.n_h()),
            storage_index(k3, g.n_v()),
        )]
    }

    pub fn set_mode(&mut self, k1: i64, k2: i64, k3: i64, value: Complex64) {
        let g = self.grid;
        let idx = g.index(
            storage_index(k1, g.n_h()),
            storage_index(k2, g.n_h()),
            storage_index(k3, g.n_v()),
        );
        self.coeffs[idx] = value;
    }

    /// Reinterprets the coefficients on another grid with the same point
    /// counts (used by the vertical stretch).
    pub fn relabel(self, grid: Grid) -> Result<Self> {
        if grid.dims() != self.grid.dims() {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            grid,
            coeffs: self.coeffs,
        })
    }

    pub fn ensure_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// Multiplies every coefficient by `m(i1, i2, i3)`.
    pub fn apply(&mut self, m: impl Fn(usize, usize, usize) -> Complex64 + Sync) {
        let g = self.grid;
        let (n_h, n_v) = (g.n_h(), g.n_v());
        self.coeffs
            .par_chunks_mut(n_h * n_v)
            .enumerate()
            .for_each(|(i1, plane)| {
                for i2 in 0..n_h {
                    for i3 in 0..n_v {
                        plane[i2 * n_v + i3] *= m(i1, i2, i3);
                    }
                }
            });
    }

    /// Copy multiplied by `m(i1, i2, i3)`.
    pub fn mapped(&self, m: impl Fn(usize, usize, usize) -> Complex64 + Sync) -> Self {
        let mut out = self.clone();
        out.apply(m);
        out
    }

    /// Real multiplier variant of [`SpectralField::mapped`].
    pub fn scaled_by(&self, m: impl Fn(usize, usize, usize) -> f64 + Sync) -> Self {
        self.mapped(|a, b, c| Complex64::new(m(a, b, c), 0.0))
    }

    pub fn axpy(&mut self, alpha: f64, x: &Self) {
        assert_eq!(self.grid, x.grid, "axpy across grids");
        self.coeffs
            .par_iter_mut()
            .zip(x.coeffs.par_iter())
            .for_each(|(y, x)| *y += x * alpha);
    }

    pub fn scale(&mut self, alpha: f64) {
        self.coeffs.par_iter_mut().for_each(|c| *c *= alpha);
    }

    /// `Σ |c_k|²`.
    pub fn coeff_energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `‖f‖_{L²}` over the box.
    pub fn l2_norm(&self) -> f64 {
        (self.grid.volume() * self.coeff_energy()).sqrt()
    }

    /// `∫ f g` over the box for real fields.
    pub fn l2_inner(&self, other: &Self) -> f64 {
        assert_eq!(self.grid, other.grid, "inner product across grids");
        let s: f64 = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a * b.conj()).re)
            .sum();
        self.grid.volume() * s
    }

    /// Largest coefficient modulus.
    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest modulus of the difference of coefficients.
    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.grid, other.grid);
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Sup of |f| over grid points.
    pub fn max_abs(&self) -> f64 {
        self.to_physical().iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Replaces every coefficient by the average of itself and the conjugate
    /// of its mirror, so the physical field is exactly real.
    pub fn symmetrize(&mut self) {
        let g = self.grid;
        let (n_h, n_v) = (g.n_h(), g.n_v());
        let mirror = |i: usize, n: usize| (n - i) % n;
        let src = self.coeffs.clone();
        self.coeffs
            .par_chunks_mut(n_h * n_v)
            .enumerate()
            .for_each(|(i1, plane)| {
                for i2 in 0..n_h {
                    for i3 in 0..n_v {
                        let m = g.index(mirror(i1, n_h), mirror(i2, n_h), mirror(i3, n_v));
                        plane[i2 * n_v + i3] = 0.5 * (src[g.index(i1, i2, i3)] + src[m].conj());
                    }
                }
            });
    }

    /// Largest deviation from Hermitian symmetry.
    pub fn hermitian_defect(&self) -> f64 {
        let g = self.grid;
        let (n_h, n_v) = (g.n_h(), g.n_v());
        let mirror = |i: usize, n: usize| (n - i) % n;
        let mut worst = 0.0f64;
        for idx in 0..self.coeffs.len() {
            let (a, b, c) = g.unravel(idx);
            let m = g.index(mirror(a, n_h), mirror(b, n_h), mirror(c, n_v));
            worst = worst.max((self.coeffs[idx] - self.coeffs[m].conj()).norm());
        }
        worst
    }

    /// Relative content on the modes a multiplier keeps: `sqrt(Σ_kept|c|²/Σ|c|²)`.
    pub fn fraction_where(&self, keep: impl Fn(usize, usize, usize) -> bool) -> f64 {
        let total = self.coeff_energy();
        if total == 0.0 {
            return 0.0;
        }
        let g = self.grid;
        let part: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(idx, _)| {
                let (a, b, c) = g.unravel(*idx);
                keep(a, b, c)
            })
            .map(|(_, c)| c.norm_sqr())
            .sum();
        (part / total).sqrt()
    }
}

/// Samples `f` at the grid points in storage order.
pub fn sample_fn(grid: Grid, f: impl Fn(f64, f64, f64) -> f64 + Sync) -> Vec<f64> {
    let (n_h, n_v) = (grid.n_h(), grid.n_v());
    let mut out = vec![0.0; grid.n_points()];
    out.par_chunks_mut(n_h * n_v)
        .enumerate()
        .for_each(|(i1, plane)| {
            let x1 = grid.coord(Axis::X1, i1);
            for i2 in 0..n_h {
                let x2 = grid.coord(Axis::X2, i2);
                for i3 in 0..n_v {
                    plane[i2 * n_v + i3] = f(x1, x2, grid.coord(Axis::X3, i3));
                }
            }
        });
    out
}

impl Add<&SpectralField> for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&SpectralField> for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl AddAssign<&SpectralField> for SpectralField {
    fn add_assign(&mut self, rhs: &SpectralField) {
        self.axpy(1.0, rhs);
    }
}

impl SubAssign<&SpectralField> for SpectralField {
    fn sub_assign(&mut self, rhs: &SpectralField) {
        self.axpy(-1.0, rhs);
    }
}

impl Mul<f64> for &SpectralField {
    type Output = SpectralField;
    fn mul(self, rhs: f64) -> SpectralField {
        let mut out = self.clone();
        out.scale(rhs);
        out
    }
}

impl Neg for &SpectralField {
    type Output = SpectralField;
    fn neg(self) -> SpectralField {
        self * -1.0
    }
}

/// Three velocity components on a common grid, stamped with a time.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityState {
    pub components: [SpectralField; 3],
    pub time: f64,
}

impl VelocityState {
    pub fn new(components: [SpectralField; 3], time: f64) -> Result<Self> {
        let g = components[0].grid();
        if components.iter().any(|c| c.grid() != g) {
            return Err(Error::GridMismatch);
        }
        Ok(Self { components, time })
    }

    pub fn zeros(grid: Grid, time: f64) -> Self {
        Self {
            components: std::array::from_fn(|_| SpectralField::zeros(grid)),
            time,
        }
    }

    pub fn grid(&self) -> Grid {
        self.components[0].grid()
    }

    pub fn l2_norm(&self) -> f64 {
        vector_l2_norm(&self.components)
    }
}

/// `‖v‖_{L²}` of a vector field.
pub fn vector_l2_norm(v: &[SpectralField]) -> f64 {
    v.iter().map(|c| c.l2_norm().powi(2)).sum::<f64>().sqrt()
}

/// Componentwise difference of two vector fields.
pub fn vector_sub(a: &[SpectralField; 3], b: &[SpectralField; 3]) -> [SpectralField; 3] {
    std::array::from_fn(|i| &a[i] - &b[i])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimension_mismatch_is_reported() {
        let g = Grid::cube(4).unwrap();
        let err = SpectralField::from_physical(g, &[0.0; 10]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { expected: 64, actual: 10 }));
    }

    #[test]
    fn constant_is_only_zero_mode() {
        let g = Grid::new(8, 4, 1).unwrap();
        let f = SpectralField::from_fn(g, |_, _, _| 1.0);
        assert!((f.mode(0, 0, 0).re - 1.0).abs() < 1e-15);
        let rest: f64 = f.coeffs()[1..].iter().map(|c| c.norm()).sum();
        assert!(rest < 1e-14);
    }

    #[test]
    fn refined_samples_interpolate() {
        let g = Grid::new(8, 8, 1).unwrap();
        let f = SpectralField::from_fn(g, |x, y, z| (x + 2.0 * y).sin() + (0.5 * z).cos());
        let (fine, samples) = f.to_physical_refined(2);
        let exact = sample_fn(fine, |x, y, z| (x + 2.0 * y).sin() + (0.5 * z).cos());
        for (a, b) in samples.iter().zip(&exact) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn l2_norm_uses_box_volume() {
        let g = Grid::new(8, 8, 2).unwrap();
        let f = SpectralField::from_fn(g, |x, _, _| x.sin());
        let expected = (g.volume() / 2.0).sqrt();
        assert!((f.l2_norm() - expected).abs() < 1e-12 * expected);
    }
}
