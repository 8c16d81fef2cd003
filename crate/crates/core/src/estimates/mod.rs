//! Numerical checks of the inequalities and identities behind the remainder
//! estimate. Unspecified constants are treated as boundedness claims: a
//! check records `LHS/RHS` per sample and the sweep looks at how much the
//! largest ratio moves across dyadic scales.

pub mod anisotropic;
pub mod bernstein;
pub mod energy;
pub mod samples;
pub mod suite;
pub mod trilinear;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::block_weight;
use crate::spectral::{Axis, Grid, SpectralField};

pub use anisotropic::{check_estimate11, check_product_laws, estimate11_sides, ProductLawReports};
pub use bernstein::{check_bernstein_horizontal, check_bernstein_vertical, check_inverse_bernstein};
pub use energy::{
    block_balance_trace, check_block_energy_balance, BalanceResidual, BlockBalanceSample, BlockBalanceTrace,
};
pub use samples::{coherent_sample, gaussian_sample, sample_set, Band, Sample};
pub use suite::{energy_summary, run_suite, CheckSummary, SuiteConfig, SuiteName};
pub use trilinear::{check_trilinear, TrilinearFields, TrilinearKind};

/// Largest accepted ratio of the biggest to the smallest per-scale maximum.
pub const SPREAD_LIMIT: f64 = 4.0;

/// One measured `LHS/RHS`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioSample {
    /// Dyadic index of the sweep the sample belongs to.
    pub index: i32,
    pub grid: [usize; 3],
    /// `None` for deterministic samples.
    pub seed: Option<u64>,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub check_id: String,
    pub samples: Vec<RatioSample>,
    /// Samples dropped because both sides vanished.
    pub filtered: usize,
}

impl RatioReport {
    pub fn new(check_id: impl Into<String>) -> Self {
        Self {
            check_id: check_id.into(),
            samples: Vec::new(),
            filtered: 0,
        }
    }

    /// Records `lhs/rhs`. `0/0` is filtered; a positive left side over a
    /// zero right side is an error.
    pub fn push(&mut self, index: i32, grid: [usize; 3], seed: Option<u64>, lhs: f64, rhs: f64) -> Result<()> {
        if !(lhs.is_finite() && rhs.is_finite() && lhs >= 0.0 && rhs >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "{}: non-finite or negative sides {lhs:e} / {rhs:e}",
                self.check_id
            )));
        }
        if rhs == 0.0 {
            if lhs == 0.0 {
                self.filtered += 1;
                return Ok(());
            }
            return Err(Error::InvalidArgument(format!(
                "{}: right-hand side vanishes while the left is {lhs:e}",
                self.check_id
            )));
        }
        self.samples.push(RatioSample {
            index,
            grid,
            seed,
            lhs,
            rhs,
            ratio: lhs / rhs,
        });
        Ok(())
    }

    /// Appends the samples of another report of the same check.
    pub fn merge(&mut self, other: RatioReport) {
        self.samples.extend(other.samples);
        self.filtered += other.filtered;
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn max_ratio(&self) -> f64 {
        self.samples.iter().map(|s| s.ratio).fold(0.0, f64::max)
    }

    /// Largest ratio per dyadic index.
    pub fn per_index_max(&self) -> BTreeMap<i32, f64> {
        let mut out = BTreeMap::new();
        for s in &self.samples {
            let e = out.entry(s.index).or_insert(0.0f64);
            *e = e.max(s.ratio);
        }
        out
    }

    /// `max_q (max ratio at q) / min_q (max ratio at q)`, over indices with
    /// a positive maximum. `None` with fewer than one such index.
    pub fn spread(&self) -> Option<f64> {
        let maxima: Vec<f64> = self.per_index_max().into_values().filter(|&m| m > 0.0).collect();
        if maxima.is_empty() {
            return None;
        }
        let hi = maxima.iter().copied().fold(0.0, f64::max);
        let lo = maxima.iter().copied().fold(f64::INFINITY, f64::min);
        Some(hi / lo)
    }

    /// `Σ_q (max ratio at q)^{1/2}`.
    pub fn sqrt_sum(&self) -> f64 {
        self.per_index_max().values().map(|r| r.sqrt()).sum()
    }
}

fn inv(p: f64) -> f64 {
    if p.is_infinite() {
        0.0
    } else {
        1.0 / p
    }
}

fn check_exponent(p: f64) -> Result<()> {
    if p >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("Lebesgue exponent must be in [1, ∞], got {p}")))
    }
}

/// `w_q(|ξ₃|)²` per vertical storage index.
pub(crate) fn squared_block_weights(g: Grid, q: i32) -> Vec<f64> {
    g.wavenumbers(Axis::X3)
        .iter()
        .map(|k| if *k == 0.0 { 0.0 } else { block_weight(q, k.abs()).powi(2) })
        .collect()
}

/// `(Δ_qᵛ f | Δ_qᵛ g)_{L²}` summed over components.
pub fn block_pairing(f: &[SpectralField], g: &[SpectralField], q: i32) -> f64 {
    let grid = f[0].grid();
    let w = squared_block_weights(grid, q);
    let n_v = grid.n_v();
    let mut s = 0.0;
    for (a, b) in f.iter().zip(g) {
        assert_eq!(a.grid(), b.grid(), "pairing across grids");
        for (idx, (x, y)) in a.coeffs().iter().zip(b.coeffs()).enumerate() {
            let wq = w[idx % n_v];
            if wq != 0.0 {
                s += wq * (x * y.conj()).re;
            }
        }
    }
    grid.volume() * s
}

/// `‖f‖_{L^p}` over the box. `p = 2` uses Parseval; other exponents are
/// evaluated on the grid refined twice in every direction.
pub fn lp_norm(f: &SpectralField, p: f64) -> f64 {
    if p == 2.0 {
        return f.l2_norm();
    }
    let samples = f.zero_padded(2).to_physical();
    if p.is_infinite() {
        return samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    }
    let mean = samples.iter().map(|v| v.abs().powf(p)).sum::<f64>() / samples.len() as f64;
    (f.grid().volume() * mean).powf(1.0 / p)
}

/// `∫ values dt` on uniform or nonuniform nodes: composite Simpson when the
/// nodes are uniform (with a 3/8 panel for an odd interval count), trapezoid
/// otherwise.
pub fn time_integral(times: &[f64], values: &[f64]) -> f64 {
    let n = times.len();
    assert_eq!(n, values.len(), "times and values differ in length");
    if n < 2 {
        return 0.0;
    }
    let h = (times[n - 1] - times[0]) / (n - 1) as f64;
    let uniform = times.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs());
    let intervals = n - 1;
    if !uniform || intervals < 2 {
        return times
            .windows(2)
            .zip(values.windows(2))
            .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
            .sum();
    }
    let simpson = |v: &[f64]| -> f64 {
        let mut s = v[0] + v[v.len() - 1];
        for (i, x) in v.iter().enumerate().take(v.len() - 1).skip(1) {
            s += if i % 2 == 1 { 4.0 * x } else { 2.0 * x };
        }
        s * h / 3.0
    };
    if intervals % 2 == 0 {
        simpson(values)
    } else if intervals == 3 {
        3.0 * h / 8.0 * (values[0] + 3.0 * values[1] + 3.0 * values[2] + values[3])
    } else {
        let tail = &values[n - 4..];
        simpson(&values[..n - 3]) + 3.0 * h / 8.0 * (tail[0] + 3.0 * tail[1] + 3.0 * tail[2] + tail[3])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    #[test]
    fn integral_rules_are_exact_on_cubics() {
        let f = |t: f64| 1.0 + t - 2.0 * t * t + 0.5 * t.powi(3);
        let exact = |t: f64| t + 0.5 * t * t - 2.0 / 3.0 * t.powi(3) + 0.125 * t.powi(4);
        for n in [3usize, 4, 5, 8, 11] {
            let t: Vec<f64> = (0..n).map(|i| 2.0 * i as f64 / (n - 1) as f64).collect();
            let v: Vec<f64> = t.iter().map(|&x| f(x)).collect();
            assert!((time_integral(&t, &v) - exact(2.0)).abs() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn lp_norms_of_a_cosine() {
        let g = Grid::new(8, 8, 0).unwrap();
        let f = SpectralField::from_fn(g, |x, _, _| x.cos());
        let vol = g.volume();
        assert!((lp_norm(&f, 2.0) - (vol / 2.0).sqrt()).abs() < 1e-12);
        assert!((lp_norm(&f, f64::INFINITY) - 1.0).abs() < 1e-12);
        // ∫cos⁴ = 3/8 of the volume.
        assert!((lp_norm(&f, 4.0) - (0.375 * vol).powf(0.25)).abs() < 1e-12);
    }

    #[test]
    fn report_filters_and_spreads() {
        let mut r = RatioReport::new("t");
        r.push(0, [1, 1, 1], None, 0.0, 0.0).unwrap();
        r.push(0, [1, 1, 1], None, 1.0, 2.0).unwrap();
        r.push(1, [1, 1, 1], None, 3.0, 2.0).unwrap();
        assert!(r.push(1, [1, 1, 1], None, 1.0, 0.0).is_err());
        assert_eq!(r.filtered, 1);
        assert_eq!(r.spread(), Some(3.0));
        assert_eq!(r.max_ratio(), 1.5);
    }
}
