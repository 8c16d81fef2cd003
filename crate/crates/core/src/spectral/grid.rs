use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Periodic box `T² × T_v`: both horizontal periods are 2π, the vertical
/// period is `2π·2^stretch`.
///
/// Storage order of every field on the grid is `[i1][i2][i3]` with the
/// vertical index fastest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Grid {
    n_h: usize,
    n_v: usize,
    stretch: u32,
}

/// Coordinate axis. `X1`, `X2` are horizontal, `X3` vertical.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X1,
    X2,
    X3,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X1, Axis::X2, Axis::X3];

    pub fn index(self) -> usize {
        match self {
            Axis::X1 => 0,
            Axis::X2 => 1,
            Axis::X3 => 2,
        }
    }
}

/// Signed FFT index: `0..n/2` map to themselves, the rest to `i - n`.
/// The Nyquist index comes out as `-n/2`.
#[inline]
pub fn signed_index(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// Inverse of [`signed_index`]; panics if `k` is out of range.
#[inline]
pub fn storage_index(k: i64, n: usize) -> usize {
    let n_i = n as i64;
    assert!(k >= -n_i / 2 && k < n_i / 2, "mode {k} outside grid of {n}");
    k.rem_euclid(n_i) as usize
}

impl Grid {
    pub fn new(n_h: usize, n_v: usize, stretch: u32) -> Result<Self> {
        for (name, n) in [("n_h", n_h), ("n_v", n_v)] {
            if n < 4 || !n.is_power_of_two() {
                return Err(Error::InvalidGrid(format!(
                    "{name} = {n} must be a power of two >= 4"
                )));
            }
        }
        if stretch > 30 {
            return Err(Error::InvalidGrid(format!("stretch exponent {stretch} too large")));
        }
        Ok(Self { n_h, n_v, stretch })
    }

    /// Unit-period box (`len_v = 2π`).
    pub fn unit(n_h: usize, n_v: usize) -> Result<Self> {
        Self::new(n_h, n_v, 0)
    }

    pub fn cube(n: usize) -> Result<Self> {
        Self::new(n, n, 0)
    }

    pub fn n_h(&self) -> usize {
        self.n_h
    }

    pub fn n_v(&self) -> usize {
        self.n_v
    }

    pub fn stretch(&self) -> u32 {
        self.stretch
    }

    /// Same point counts, different vertical stretch.
    pub fn with_stretch(&self, stretch: u32) -> Self {
        Self { stretch, ..*self }
    }

    /// `ε = 2^-stretch`.
    pub fn eps(&self) -> f64 {
        (-(self.stretch as f64)).exp2()
    }

    pub fn len_h(&self) -> f64 {
        2.0 * PI
    }

    pub fn len_v(&self) -> f64 {
        2.0 * PI * (self.stretch as f64).exp2()
    }

    pub fn volume(&self) -> f64 {
        self.len_h() * self.len_h() * self.len_v()
    }

    pub fn dims(&self) -> [usize; 3] {
        [self.n_h, self.n_h, self.n_v]
    }

    pub fn n_points(&self) -> usize {
        self.n_h * self.n_h * self.n_v
    }

    pub fn n_axis(&self, axis: Axis) -> usize {
        match axis {
            Axis::X3 => self.n_v,
            _ => self.n_h,
        }
    }

    pub fn spacing(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X3 => self.len_v() / self.n_v as f64,
            _ => self.len_h() / self.n_h as f64,
        }
    }

    /// Smallest nonzero wavenumber on an axis.
    pub fn fundamental(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X3 => self.eps(),
            _ => 1.0,
        }
    }

    #[inline]
    pub fn index(&self, i1: usize, i2: usize, i3: usize) -> usize {
        (i1 * self.n_h + i2) * self.n_v + i3
    }

    /// Inverse of [`Grid::index`].
    #[inline]
    pub fn unravel(&self, idx: usize) -> (usize, usize, usize) {
        let i3 = idx % self.n_v;
        let rest = idx / self.n_v;
        (rest / self.n_h, rest % self.n_h, i3)
    }

    /// Physical coordinate of a grid point along `axis`.
    pub fn coord(&self, axis: Axis, i: usize) -> f64 {
        i as f64 * self.spacing(axis)
    }

    /// True wavenumber of storage index `i` along `axis`.
    #[inline]
    pub fn wavenumber(&self, axis: Axis, i: usize) -> f64 {
        signed_index(i, self.n_axis(axis)) as f64 * self.fundamental(axis)
    }

    /// Wavenumber used by first-derivative multipliers: the Nyquist
    /// index maps to zero so that real fields stay real.
    #[inline]
    pub fn deriv_wavenumber(&self, axis: Axis, i: usize) -> f64 {
        let n = self.n_axis(axis);
        if i == n / 2 {
            0.0
        } else {
            self.wavenumber(axis, i)
        }
    }

    /// Per-axis table of [`Grid::deriv_wavenumber`].
    pub fn deriv_wavenumbers(&self, axis: Axis) -> Vec<f64> {
        (0..self.n_axis(axis)).map(|i| self.deriv_wavenumber(axis, i)).collect()
    }

    /// Per-axis table of [`Grid::wavenumber`].
    pub fn wavenumbers(&self, axis: Axis) -> Vec<f64> {
        (0..self.n_axis(axis)).map(|i| self.wavenumber(axis, i)).collect()
    }

    /// Highest retained |index| under the 2/3 rule.
    pub fn dealias_cutoff(&self, axis: Axis) -> i64 {
        (self.n_axis(axis) / 3) as i64
    }

    /// Per-axis keep flags for the 2/3 rule.
    pub fn dealias_keep(&self, axis: Axis) -> Vec<bool> {
        let n = self.n_axis(axis);
        let cut = self.dealias_cutoff(axis);
        (0..n).map(|i| signed_index(i, n).abs() <= cut).collect()
    }
}
