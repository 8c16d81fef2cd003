//! Seeded random and coherent sample fields with prescribed frequency
//! support.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::spectral::{signed_index, Axis, Grid, SpectralField};
use crate::Complex64;

/// Relative content outside the declared band that still counts as inside.
pub const SUPPORT_TOL: f64 = 1e-12;

/// Frequency support in true wavenumbers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Band {
    /// `|ξ_h| ≤ rh` and `|ξ₃| ≤ r3`.
    Ball { rh: f64, r3: f64 },
    /// `|ξ_h| ≤ rh` and `lo ≤ |ξ₃| ≤ hi`.
    VerticalRing { rh: f64, lo: f64, hi: f64 },
}

impl Band {
    pub fn contains(&self, kh: f64, k3: f64) -> bool {
        let slack = 1e-9;
        let k3 = k3.abs();
        match *self {
            Band::Ball { rh, r3 } => kh <= rh + slack && k3 <= r3 + slack,
            Band::VerticalRing { rh, lo, hi } => kh <= rh + slack && k3 >= lo - slack && k3 <= hi + slack,
        }
    }

    /// Relative `L²` content of `f` outside the band.
    pub fn violation(&self, f: &SpectralField) -> f64 {
        let g = f.grid();
        let (k1, k3) = (g.wavenumbers(Axis::X1), g.wavenumbers(Axis::X3));
        f.fraction_where(|a, b, c| !self.contains((k1[a] * k1[a] + k1[b] * k1[b]).sqrt(), k3[c]))
    }

    pub(crate) fn require(&self, f: &SpectralField) -> Result<()> {
        let v = self.violation(f);
        if v > SUPPORT_TOL {
            return Err(Error::InvalidArgument(format!(
                "sample has relative content {v:.3e} outside {self:?}"
            )));
        }
        Ok(())
    }
}

/// A sample field and the seed that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub field: SpectralField,
    pub seed: Option<u64>,
}

impl Sample {
    pub fn exact(field: SpectralField) -> Self {
        Self { field, seed: None }
    }
}

/// Modes of `g` inside `band`, Nyquist indices excluded.
fn band_modes(g: Grid, band: Band) -> Vec<usize> {
    let (k1, k3) = (g.wavenumbers(Axis::X1), g.wavenumbers(Axis::X3));
    let (n_h, n_v) = (g.n_h(), g.n_v());
    let nyq = |i: usize, n: usize| signed_index(i, n) == -(n as i64) / 2;
    (0..g.n_points())
        .filter(|&idx| {
            let (a, b, c) = g.unravel(idx);
            !nyq(a, n_h)
                && !nyq(b, n_h)
                && !nyq(c, n_v)
                && band.contains((k1[a] * k1[a] + k1[b] * k1[b]).sqrt(), k3[c])
        })
        .collect()
}

/// Independent standard complex Gaussian coefficients on the band, made
/// Hermitian.
pub fn gaussian_sample(g: Grid, band: Band, seed: u64) -> Sample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = SpectralField::zeros(g);
    for idx in band_modes(g, band) {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        f.coeffs_mut()[idx] = Complex64::new(re, im);
    }
    f.symmetrize();
    Sample { field: f, seed: Some(seed) }
}

/// Every band coefficient equal to one: all modes peak together at the
/// origin, which is where sup norms are largest for a given `L²` norm.
pub fn coherent_sample(g: Grid, band: Band) -> Sample {
    let mut f = SpectralField::zeros(g);
    for idx in band_modes(g, band) {
        f.coeffs_mut()[idx] = Complex64::new(1.0, 0.0);
    }
    Sample::exact(f)
}

/// The coherent sample followed by `count` Gaussian samples with seeds
/// `base_seed, base_seed + 1, …`.
pub fn sample_set(g: Grid, band: Band, count: usize, base_seed: u64) -> Vec<Sample> {
    std::iter::once(coherent_sample(g, band))
        .chain((0..count as u64).map(|i| gaussian_sample(g, band, base_seed.wrapping_add(i))))
        .collect()
}
