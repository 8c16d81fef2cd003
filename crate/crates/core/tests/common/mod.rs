#![allow(dead_code)]

use anivisc_core::{Grid, SpectralField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform noise in [-1, 1] at every grid point.
pub fn noise_samples(g: Grid, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    (0..g.n_points()).map(|_| r.random_range(-1.0..1.0)).collect()
}

pub fn noise(g: Grid, seed: u64) -> SpectralField {
    SpectralField::from_physical(g, &noise_samples(g, seed)).unwrap()
}

/// Random real trigonometric polynomial with integer index |k_i| <= kmax.
pub fn band_limited(g: Grid, kmax: [i64; 3], seed: u64) -> SpectralField {
    let mut r = rng(seed);
    let mut f = SpectralField::zeros(g);
    for a in -kmax[0]..=kmax[0] {
        for b in -kmax[1]..=kmax[1] {
            for c in -kmax[2]..=kmax[2] {
                let z = anivisc_core::Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
                f.set_mode(a, b, c, z);
            }
        }
    }
    f.symmetrize();
    f
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Quadrature of `|f|^2` over the box from physical samples.
pub fn l2_quadrature(g: Grid, samples: &[f64]) -> f64 {
    let cell = g.volume() / g.n_points() as f64;
    (samples.iter().map(|x| x * x).sum::<f64>() * cell).sqrt()
}
