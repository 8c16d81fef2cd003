//! The ε-sweep: for each stretch exponent, solve the full system from the
//! slowly varying data, build `u_app` from the slice model and measure the
//! remainder `Rᵉ = uᵉ − u_app`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::initial::{build_initial_data, InitialDataSpec};
use super::partition::{time_partition, Partition};
use crate::error::{Error, Result};
use crate::lp::{
    chemin_lerner_norm, l1_time_norm, BesovSpec, BlockTable, ModeWeight, NormTimeSeries, TimeExponent,
};
use crate::solvers::{assemble_uapp, ApproxSnapshot, ApproxSolver, NshSolver, StepperConfig, Trajectory};
use crate::spectral::{vector_sub, SpectralField, VelocityState};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n_h: usize,
    pub n_v: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub m_values: Vec<u32>,
    pub grid: GridSpec,
    pub stepper: StepperConfig,
    #[serde(default)]
    pub data: InitialDataSpec,
    #[serde(default = "default_cbar")]
    pub cbar: f64,
    #[serde(default = "default_blowup")]
    pub blowup_factor: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_cbar() -> f64 {
    1e-3
}

fn default_blowup() -> f64 {
    1e3
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            m_values: vec![1, 2, 3, 4],
            grid: GridSpec { n_h: 64, n_v: 64 },
            stepper: StepperConfig::default(),
            data: InitialDataSpec::default(),
            cbar: default_cbar(),
            blowup_factor: default_blowup(),
            seed: 0,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m_values.is_empty() {
            return Err(Error::Empty("m_values"));
        }
        if self.m_values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("m_values must be strictly increasing".into()));
        }
        if !(self.cbar > 0.0) || !(self.blowup_factor > 1.0) {
            return Err(Error::Config("cbar must be positive and blowup_factor above 1".into()));
        }
        self.stepper.validate()
    }
}

/// Everything the observer of a paired run sees at one snapshot.
pub struct RemainderSnapshot<'a> {
    pub time: f64,
    pub u: &'a [SpectralField],
    pub approx: &'a ApproxSnapshot,
    pub uapp: &'a VelocityState,
    pub m: u32,
    /// `½‖u‖²` of the full solution.
    pub energy: f64,
    /// `∫₀ᵗ ‖∇ʰu‖²` accumulated by the full solver.
    pub dissipated: f64,
}

impl RemainderSnapshot<'_> {
    pub fn remainder(&self) -> [SpectralField; 3] {
        let u: [SpectralField; 3] = self.u.to_vec().try_into().expect("three components");
        vector_sub(&u, &self.uapp.components)
    }
}

/// Steps the full system and the slice model side by side from the same
/// data and calls `observe` at step 0 and every snapshot step.
pub fn run_paired(
    data: &InitialDataSpec,
    grid: GridSpec,
    m: u32,
    stepper: StepperConfig,
    mut observe: impl FnMut(&RemainderSnapshot) -> Result<()>,
) -> Result<()> {
    let init = build_initial_data(data, grid.n_h, grid.n_v, m)?;
    let mut approx = ApproxSolver::new(&init.uh, &init.w3, stepper)?;
    let mut nsh = NshSolver::new(&init.state, stepper)?;
    let mut emit = |approx: &ApproxSolver, nsh: &NshSolver| -> Result<()> {
        let snap = approx.snapshot();
        let uapp = assemble_uapp(&snap.uh, &snap.w3, m, approx.time())?;
        observe(&RemainderSnapshot {
            time: nsh.time(),
            u: nsh.components(),
            approx: &snap,
            uapp: &uapp,
            m,
            energy: nsh.energy(),
            dissipated: nsh.dissipated(),
        })
    };
    emit(&approx, &nsh)?;
    let mut step = 0;
    while !nsh.is_done() {
        approx.step()?;
        nsh.step()?;
        step += 1;
        if stepper.is_snapshot(step) {
            emit(&approx, &nsh)?;
        }
    }
    Ok(())
}

/// The norms of `u_app` controlling the remainder estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UappNorms {
    /// `‖u_app‖_{L̃^∞ B^{0,1/2}}`
    pub linf_b0_half: f64,
    /// `‖u_app‖_{L̃² 𝓑^{1,1/2}}`
    pub l2_b1_half: f64,
    /// `‖∂₃u_app‖_{L̃² 𝓑^{0,1/2}}`
    pub d3_l2_b0_half: f64,
    /// `‖u_app‖_{L̃² 𝓑^{0,1/2}}`
    pub l2_b0_half: f64,
    /// `‖∂₃u_app‖_{L¹ 𝓑^{1,1/2}}`
    pub d3_l1_b1_half: f64,
}

/// Block tables of `u_app` and of `∂₃u_app` along a run.
#[derive(Debug, Clone, Default)]
pub struct UappSeries {
    pub plain: NormTimeSeries,
    pub d3: NormTimeSeries,
}

impl UappSeries {
    pub fn push(&mut self, t: f64, u: &[SpectralField]) -> Result<()> {
        self.plain.push(t, BlockTable::of_vector(u, ModeWeight::Identity))?;
        self.d3.push(t, BlockTable::of_vector(u, ModeWeight::VerticalDerivative))
    }

    pub fn from_trajectory(traj: &Trajectory<VelocityState>) -> Result<Self> {
        let mut s = Self::default();
        for (&t, u) in traj.times.iter().zip(&traj.states) {
            s.push(t, &u.components)?;
        }
        Ok(s)
    }

    pub fn norms(&self) -> Result<UappNorms> {
        if self.plain.len() < 2 {
            return Err(Error::Empty("u_app trajectory"));
        }
        let b = BesovSpec::anisotropic;
        Ok(UappNorms {
            linf_b0_half: chemin_lerner_norm(&self.plain, TimeExponent::Infinity, &BesovSpec::vertical(0.5))?,
            l2_b1_half: chemin_lerner_norm(&self.plain, TimeExponent::Two, &b(1.0, 0.5))?,
            d3_l2_b0_half: chemin_lerner_norm(&self.d3, TimeExponent::Two, &b(0.0, 0.5))?,
            l2_b0_half: chemin_lerner_norm(&self.plain, TimeExponent::Two, &b(0.0, 0.5))?,
            d3_l1_b1_half: l1_time_norm(&self.d3, &b(1.0, 0.5))?,
        })
    }
}

pub fn compute_uapp_norms(traj: &Trajectory<VelocityState>) -> Result<UappNorms> {
    UappSeries::from_trajectory(traj)?.norms()
}

/// Results for one stretch exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub m: u32,
    pub eps: f64,
    /// `sup_t ‖Rᵉ‖_{B^{0,1/2}}`
    pub sup_r_b0_half: f64,
    /// `‖∇ʰRᵉ‖_{L̃² B^{0,1/2}}`
    pub l2_gradh_r: f64,
    pub uapp: UappNorms,
    pub partition: Partition,
    /// `‖u_app(t_end)‖²_{𝓑^{1,1/2}}`, the integrand of the `L̃²` norm at
    /// the final time; small values indicate the time integrals settled.
    pub uapp_tail_density: f64,
    /// Largest `|½‖u(t)‖² + ∫₀ᵗ‖∇ʰu‖² − ½‖u₀‖²| / ½‖u₀‖²` over the snapshots
    /// of the full solution.
    pub energy_residual: f64,
}

/// Least-squares line through `(log ε, log sup_t ‖Rᵉ‖)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root mean square of the fit residuals in natural-log units.
    pub residual: f64,
}

pub fn fit_log_log(x: &[f64], y: &[f64]) -> Option<SlopeFit> {
    if x.len() < 2 || x.len() != y.len() || x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return None;
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = lx.iter().zip(&ly).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    Some(SlopeFit {
        slope,
        intercept,
        residual: (rss / n).sqrt(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub config_hash: String,
    pub seed: u64,
    pub config: SweepConfig,
    pub rows: Vec<SweepRow>,
    pub slope: Option<SlopeFit>,
    /// Largest ε from which on (towards smaller ε) the fitted slope stays
    /// within [`LINEAR_SLOPE_RANGE`].
    #[serde(default)]
    pub linear_regime_eps: Option<f64>,
}

pub const LINEAR_SLOPE_RANGE: (f64, f64) = (0.8, 1.2);

/// Largest `eps[k]` such that the fit over `k..` has a slope inside
/// [`LINEAR_SLOPE_RANGE`]; `eps` decreasing.
pub fn linear_regime_eps(eps: &[f64], values: &[f64]) -> Option<f64> {
    let (lo, hi) = LINEAR_SLOPE_RANGE;
    (0..eps.len().saturating_sub(1)).find_map(|k| {
        let fit = fit_log_log(&eps[k..], &values[k..])?;
        (fit.slope >= lo && fit.slope <= hi).then_some(eps[k])
    })
}

/// One row of the sweep.
pub fn run_remainder_single(cfg: &SweepConfig, m: u32) -> Result<SweepRow> {
    let b012 = BesovSpec::vertical(0.5);
    let mut r_series = NormTimeSeries::new();
    let mut gr_series = NormTimeSeries::new();
    let mut uapp = UappSeries::default();
    let mut limit = None;
    let mut tail = 0.0;
    let (mut e0, mut balance) = (None, 0.0);
    run_paired(&cfg.data, cfg.grid, m, cfg.stepper, |s| {
        let u_norm = BlockTable::of_vector(s.u, ModeWeight::Identity).besov(&b012);
        let limit = *limit.get_or_insert(cfg.blowup_factor * u_norm.max(f64::MIN_POSITIVE));
        if !(u_norm <= limit) {
            return Err(Error::BlowUp {
                time: s.time,
                norm: u_norm,
                limit,
            });
        }
        let e0 = *e0.get_or_insert(s.energy);
        if e0 > 0.0 {
            balance = f64::max(balance, (s.energy + s.dissipated - e0).abs() / e0);
        }
        let r = s.remainder();
        r_series.push(s.time, BlockTable::of_vector(&r, ModeWeight::Identity))?;
        gr_series.push(s.time, BlockTable::of_vector(&r, ModeWeight::HorizontalGradient))?;
        uapp.push(s.time, &s.uapp.components)?;
        tail = uapp
            .plain
            .tables
            .last()
            .map(|t| t.besov(&BesovSpec::anisotropic(1.0, 0.5)).powi(2))
            .unwrap_or(0.0);
        Ok(())
    })?;
    Ok(SweepRow {
        m,
        eps: (-(m as f64)).exp2(),
        sup_r_b0_half: r_series.sup_norm(&b012)?,
        l2_gradh_r: chemin_lerner_norm(&gr_series, TimeExponent::Two, &b012)?,
        uapp: uapp.norms()?,
        partition: time_partition(&uapp.plain, cfg.cbar)?,
        uapp_tail_density: tail,
        energy_residual: balance,
    })
}

/// Runs every `m` of the sweep and fits the ε-slope of the remainder.
pub fn run_remainder_experiment(cfg: &SweepConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let rows = cfg
        .m_values
        .par_iter()
        .map(|&m| run_remainder_single(cfg, m))
        .collect::<Result<Vec<_>>>()?;
    let eps: Vec<f64> = rows.iter().map(|r| r.eps).collect();
    let sup: Vec<f64> = rows.iter().map(|r| r.sup_r_b0_half).collect();
    Ok(ExperimentReport {
        schema_version: SCHEMA_VERSION,
        config_hash: super::export::config_hash(cfg)?,
        seed: cfg.seed,
        config: cfg.clone(),
        slope: fit_log_log(&eps, &sup),
        linear_regime_eps: linear_regime_eps(&eps, &sup),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line_fits_with_zero_residual() {
        let x = [0.5, 0.25, 0.125];
        let y: Vec<f64> = x.iter().map(|e| 3.0 * e).collect();
        let f = fit_log_log(&x, &y).unwrap();
        assert!((f.slope - 1.0).abs() < 1e-12 && f.residual < 1e-12);
        assert!(fit_log_log(&[0.5], &[1.0]).is_none());
    }

    #[test]
    fn linear_regime_skips_the_bent_start() {
        let eps = [0.5, 0.25, 0.125, 0.0625];
        let vals = [0.9, 0.5, 0.25, 0.125];
        assert_eq!(linear_regime_eps(&eps, &vals), Some(0.5));
        let bent = [0.3, 0.29, 0.25, 0.125];
        assert_eq!(linear_regime_eps(&eps, &bent), Some(0.125));
        assert_eq!(linear_regime_eps(&eps, &[1.0; 4]), None);
    }

    #[test]
    fn sweep_validation() {
        let mut c = SweepConfig::default();
        c.m_values = vec![2, 1];
        assert!(c.validate().is_err());
        c.m_values.clear();
        assert!(matches!(c.validate(), Err(Error::Empty(_))));
    }
}
