//! The named check suites behind the `verify` command.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::anisotropic::{check_estimate11, check_product_laws};
use super::bernstein::{check_bernstein_horizontal, check_bernstein_vertical, check_inverse_bernstein};
use super::energy::{block_balance_trace, check_block_energy_balance};
use super::samples::{sample_set, Band, Sample};
use super::trilinear::{check_trilinear, TrilinearFields, TrilinearKind};
use super::{RatioReport, SPREAD_LIMIT};
use crate::error::{Error, Result};
use crate::harness::{run_paired, GridSpec, InitialDataSpec};
use crate::solvers::{Scheme, StepperConfig};
use crate::spectral::Grid;

/// Residual accepted for the integrated block energy balance.
pub const BALANCE_TOL: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteName {
    Bernstein,
    Product,
    Estimate11,
    Trilinear,
    Energy,
}

impl SuiteName {
    pub const ALL: [SuiteName; 5] = [
        SuiteName::Bernstein,
        SuiteName::Product,
        SuiteName::Estimate11,
        SuiteName::Trilinear,
        SuiteName::Energy,
    ];
}

impl FromStr for SuiteName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "bernstein" => Ok(SuiteName::Bernstein),
            "product" => Ok(SuiteName::Product),
            "estimate11" => Ok(SuiteName::Estimate11),
            "trilinear" => Ok(SuiteName::Trilinear),
            "energy" => Ok(SuiteName::Energy),
            other => Err(Error::InvalidArgument(format!(
                "unknown suite {other:?}; expected bernstein, product, estimate11, trilinear or energy"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    /// Points per direction of the reference grid (a power of two).
    pub n: usize,
    /// Gaussian samples per dyadic level, on top of one coherent sample.
    pub samples: usize,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            n: 32,
            samples: 50,
            seed: 2024,
        }
    }
}

/// One line of the verification report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub check_id: String,
    pub n_samples: usize,
    pub max_ratio: f64,
    pub spread: Option<f64>,
    /// `Σ_q (max ratio at q)^{1/2}` for the trilinear checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sqrt_sum: Option<f64>,
    pub pass: bool,
}

impl CheckSummary {
    /// Passes when the per-level maxima spread by less than [`SPREAD_LIMIT`].
    pub fn from_sweep(report: &RatioReport) -> Self {
        let spread = report.spread();
        Self {
            check_id: report.check_id.clone(),
            n_samples: report.len(),
            max_ratio: report.max_ratio(),
            spread,
            sqrt_sum: None,
            pass: !report.is_empty() && spread.is_some_and(|s| s < SPREAD_LIMIT),
        }
    }

    /// Passes when `Σ_q ratio_q^{1/2}` is finite.
    pub fn from_trilinear(report: &RatioReport) -> Self {
        let sum = report.sqrt_sum();
        Self {
            check_id: report.check_id.clone(),
            n_samples: report.len(),
            max_ratio: report.max_ratio(),
            spread: report.spread(),
            sqrt_sum: Some(sum),
            pass: !report.is_empty() && sum.is_finite(),
        }
    }
}

fn log2_floor(x: usize) -> i32 {
    (usize::BITS - 1 - x.leading_zeros()) as i32
}

fn seed_for(cfg: &SuiteConfig, salt: u64, level: i32) -> u64 {
    cfg.seed
        .wrapping_mul(1_000_003)
        .wrapping_add(salt * 10_007)
        .wrapping_add(level as u64 * 1009)
}

fn sweep<F>(levels: impl Iterator<Item = i32>, mut one: F) -> Result<RatioReport>
where
    F: FnMut(i32) -> Result<RatioReport>,
{
    let mut all: Option<RatioReport> = None;
    for l in levels {
        let r = one(l)?;
        match all.as_mut() {
            Some(a) => a.merge(r),
            None => all = Some(r),
        }
    }
    all.ok_or(Error::Empty("dyadic levels"))
}

/// Bernstein sweeps. Vertical checks use an `8 × 8 × 4n` grid, the
/// horizontal one a `2n × 2n × 4` grid of `x₃`-independent samples.
pub fn bernstein_reports(cfg: &SuiteConfig) -> Result<Vec<RatioReport>> {
    let gv = Grid::new(8, 4 * cfg.n, 0)?;
    let gh = Grid::new(2 * cfg.n, 4, 0)?;
    let q_top = log2_floor(2 * cfg.n - 1);
    let j_top = log2_floor(cfg.n - 1);
    let ball = |q: i32| Band::Ball { rh: 1.0, r3: (q as f64).exp2() };
    let ring = |q: i32| {
        let r = (q as f64).exp2();
        Band::VerticalRing { rh: 1.0, lo: 0.75 * r, hi: 2.0 * r }
    };
    let flat = |j: i32| Band::Ball { rh: (j as f64).exp2(), r3: 0.0 };
    let inf = f64::INFINITY;
    let n = cfg.samples;
    Ok(vec![
        sweep(2..=q_top, |q| check_bernstein_vertical(q, 0, inf, 2.0, &sample_set(gv, ball(q), n, seed_for(cfg, 1, q))))?,
        sweep(2..=q_top, |q| check_bernstein_vertical(q, 1, inf, 2.0, &sample_set(gv, ball(q), n, seed_for(cfg, 2, q))))?,
        sweep(1..=q_top - 1, |q| check_inverse_bernstein(q, 2.0, &sample_set(gv, ring(q), n, seed_for(cfg, 3, q))))?,
        sweep(1..=q_top - 1, |q| check_inverse_bernstein(q, inf, &sample_set(gv, ring(q), n, seed_for(cfg, 4, q))))?,
        sweep(0..=j_top, |j| check_bernstein_horizontal(j, inf, 2.0, &sample_set(gh, flat(j), n, seed_for(cfg, 5, j))))?,
        sweep(0..=j_top, |j| check_bernstein_horizontal(j, 4.0, 2.0, &sample_set(gh, flat(j), n, seed_for(cfg, 6, j))))?,
    ])
}

/// Levels `ℓ` with samples supported in `|ξ_h|, |ξ₃| ≤ 2^ℓ` on the `n³`
/// grid.
fn cube_levels(cfg: &SuiteConfig) -> std::ops::RangeInclusive<i32> {
    0..=log2_floor(cfg.n / 2 - 1)
}

fn cube_band(l: i32) -> Band {
    let r = (l as f64).exp2();
    Band::Ball { rh: r, r3: r }
}

pub fn estimate11_reports(cfg: &SuiteConfig) -> Result<Vec<RatioReport>> {
    let g = Grid::cube(cfg.n)?;
    Ok(vec![sweep(cube_levels(cfg), |l| {
        check_estimate11(l, 0.5, &sample_set(g, cube_band(l), cfg.samples, seed_for(cfg, 7, l)))
    })?])
}

pub fn product_reports(cfg: &SuiteConfig) -> Result<Vec<RatioReport>> {
    let g = Grid::cube(cfg.n)?;
    let mut out: Option<Vec<RatioReport>> = None;
    for l in cube_levels(cfg) {
        let a = sample_set(g, cube_band(l), cfg.samples, seed_for(cfg, 8, l));
        let b = sample_set(g, cube_band(l), cfg.samples, seed_for(cfg, 9, l));
        let pairs: Vec<(Sample, Sample)> = a.into_iter().zip(b).collect();
        let reports = check_product_laws(l, 0.5, &pairs)?.into_vec();
        match out.as_mut() {
            None => out = Some(reports),
            Some(acc) => acc.iter_mut().zip(reports).for_each(|(x, y)| x.merge(y)),
        }
    }
    out.ok_or(Error::Empty("dyadic levels"))
}

fn suite_stepper(t_end: f64, dt: f64, stride: usize) -> StepperConfig {
    StepperConfig {
        dt,
        t_end,
        scheme: Scheme::Rk4,
        snapshot_stride: stride,
        dealias: true,
    }
}

/// Trilinear ratios along the default run at `m = 2`: `RR` on the
/// remainder, `UR` with `u_app` advecting the remainder, `Jq` with the
/// remainder stretching `u_app`.
pub fn trilinear_reports(cfg: &SuiteConfig) -> Result<Vec<RatioReport>> {
    let m = 2;
    let g = Grid::new(cfg.n, cfg.n, m)?;
    let stepper = suite_stepper(0.5, 0.01, 5);
    let mut rr = TrilinearFields::new(TrilinearKind::RR, g);
    let mut ur = TrilinearFields::new(TrilinearKind::UR, g);
    let mut jq = TrilinearFields::new(TrilinearKind::Jq, g);
    let grid = GridSpec { n_h: cfg.n, n_v: cfg.n };
    run_paired(&InitialDataSpec::default(), grid, m, stepper, |s| {
        let r = s.remainder();
        let a = &s.uapp.components;
        rr.record(s.time, &r, None)?;
        ur.record(s.time, a, Some(&r))?;
        jq.record(s.time, &r, Some(a))
    })?;
    let interval = (0.0, stepper.t_end);
    Ok(vec![
        check_trilinear(&rr, interval)?,
        check_trilinear(&ur, interval)?,
        check_trilinear(&jq, interval)?,
    ])
}

/// Worst block balance residual over `q ∈ {−2, −1, 0}` along the default run
/// at `m = 2` on a `32³` grid with one snapshot per step.
pub fn energy_summary(dt: f64) -> Result<CheckSummary> {
    let stepper = suite_stepper(0.5, dt, 1);
    let qs = [-2, -1, 0];
    let trace = block_balance_trace(&InitialDataSpec::default(), GridSpec { n_h: 32, n_v: 32 }, 2, stepper, &qs)?;
    let mut worst = 0.0f64;
    for q in qs {
        worst = worst.max(check_block_energy_balance(&trace, q, (0.0, stepper.t_end))?.residual);
    }
    Ok(CheckSummary {
        check_id: format!("block_energy_balance(dt={dt})"),
        n_samples: qs.len(),
        max_ratio: worst,
        spread: None,
        sqrt_sum: None,
        pass: worst < BALANCE_TOL,
    })
}

/// Runs the named suites. Checks within a suite run one after another
/// with fixed seeds, so the output is reproducible.
pub fn run_suite(names: &[SuiteName], cfg: &SuiteConfig) -> Result<Vec<CheckSummary>> {
    if !cfg.n.is_power_of_two() || cfg.n < 8 {
        return Err(Error::Config(format!("suite grid must be a power of two ≥ 8, got {}", cfg.n)));
    }
    let mut out = Vec::new();
    for name in names {
        match name {
            SuiteName::Bernstein => out.extend(bernstein_reports(cfg)?.iter().map(CheckSummary::from_sweep)),
            SuiteName::Product => out.extend(product_reports(cfg)?.iter().map(CheckSummary::from_sweep)),
            SuiteName::Estimate11 => out.extend(estimate11_reports(cfg)?.iter().map(CheckSummary::from_sweep)),
            SuiteName::Trilinear => out.extend(trilinear_reports(cfg)?.iter().map(CheckSummary::from_trilinear)),
            SuiteName::Energy => out.push(energy_summary(0.005)?),
        }
    }
    Ok(out)
}
