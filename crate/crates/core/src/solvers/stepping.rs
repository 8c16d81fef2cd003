//! Integrating-factor Runge-Kutta for `∂_t u = Δ_h u + N(u)`.
//!
//! The horizontal heat semigroup is applied exactly; `N` is treated
//! explicitly (Lawson form).

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{Axis, Grid, SliceField, SpectralField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Rk2,
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepperConfig {
    pub dt: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    pub snapshot_stride: usize,
    #[serde(default = "default_true")]
    pub dealias: bool,
}

fn default_true() -> bool {
    true
}

impl Default for StepperConfig {
    fn default() -> Self {
        Self {
            dt: 0.01,
            t_end: 1.0,
            scheme: Scheme::Rk4,
            snapshot_stride: 4,
            dealias: true,
        }
    }
}

impl StepperConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::Config(format!("t_end must be nonnegative, got {}", self.t_end)));
        }
        if self.snapshot_stride == 0 {
            return Err(Error::Config("snapshot_stride must be at least 1".into()));
        }
        let n = self.t_end / self.dt;
        if (n - n.round()).abs() > 1e-9 * n.max(1.0) {
            return Err(Error::Config(format!(
                "t_end = {} is not a whole number of steps of {}",
                self.t_end, self.dt
            )));
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    /// Time after `step` steps, computed without accumulation.
    pub fn time_of(&self, step: usize) -> f64 {
        step as f64 * self.dt
    }

    pub fn is_snapshot(&self, step: usize) -> bool {
        step % self.snapshot_stride == 0 || step == self.n_steps()
    }
}

/// Largest stable step for the advective CFL bound.
pub fn cfl_limit(grid: Grid, max_speed: f64) -> f64 {
    let dx = grid.spacing(Axis::X1).min(grid.spacing(Axis::X3));
    if max_speed == 0.0 {
        f64::INFINITY
    } else {
        0.5 * dx / max_speed
    }
}

pub(crate) fn check_cfl(grid: Grid, max_speed: f64, dt: f64, time: f64) -> Result<()> {
    let limit = cfl_limit(grid, max_speed);
    if dt > limit {
        return Err(Error::Cfl {
            time,
            dt,
            advised: 0.9 * limit,
        });
    }
    Ok(())
}

/// `e^{−τ|ξ_h|²}` per horizontal index pair.
pub(crate) struct HeatFactors {
    n_h: usize,
    values: Vec<f64>,
}

impl HeatFactors {
    pub(crate) fn new(grid: Grid, tau: f64) -> Self {
        let k1 = grid.deriv_wavenumbers(Axis::X1);
        let k2 = grid.deriv_wavenumbers(Axis::X2);
        let mut values = Vec::with_capacity(k1.len() * k2.len());
        for a in &k1 {
            for b in &k2 {
                values.push((-tau * (a * a + b * b)).exp());
            }
        }
        Self {
            n_h: grid.n_h(),
            values,
        }
    }

    #[inline]
    pub(crate) fn at(&self, a: usize, b: usize) -> f64 {
        self.values[a * self.n_h + b]
    }
}

/// Coefficient arrays the stepper can combine.
pub(crate) trait Coeffs: Clone + Send + Sync {
    fn axpy(&mut self, a: f64, x: &Self);
    fn heat(&mut self, h: &HeatFactors);
}

impl Coeffs for SpectralField {
    fn axpy(&mut self, a: f64, x: &Self) {
        SpectralField::axpy(self, a, x);
    }
    fn heat(&mut self, h: &HeatFactors) {
        self.apply(|a, b, _| Complex64::new(h.at(a, b), 0.0));
    }
}

impl Coeffs for SliceField {
    fn axpy(&mut self, a: f64, x: &Self) {
        SliceField::axpy(self, a, x);
    }
    fn heat(&mut self, h: &HeatFactors) {
        self.apply(|a, b| Complex64::new(h.at(a, b), 0.0));
    }
}

fn combine<S: Coeffs>(x: &[S], a: f64, y: &[S]) -> Vec<S> {
    x.iter()
        .zip(y)
        .map(|(x, y)| {
            let mut z = x.clone();
            z.axpy(a, y);
            z
        })
        .collect()
}

fn heat_all<S: Coeffs>(x: &mut [S], h: &HeatFactors) {
    x.iter_mut().for_each(|c| c.heat(h));
}

/// One Lawson step from `u` with `k1 = N(u)` already evaluated.
///
/// `nonlinear(offset, state)` evaluates `N` at time `t + offset·dt`.
/// `stage(weight, state)` is called for every stage state with its
/// quadrature weight (summing to 1), so callers can integrate functionals
/// of the solution with the same order as the scheme.
#[allow(clippy::too_many_arguments)]
pub(crate) fn lawson_step<S: Coeffs>(
    scheme: Scheme,
    u: &[S],
    k1: Vec<S>,
    dt: f64,
    full: &HeatFactors,
    half: &HeatFactors,
    mut nonlinear: impl FnMut(f64, &[S]) -> Result<Vec<S>>,
    mut stage: impl FnMut(f64, &[S]),
) -> Result<Vec<S>> {
    match scheme {
        Scheme::Rk2 => {
            stage(0.5, u);
            let mut star = combine(u, dt, &k1);
            heat_all(&mut star, full);
            stage(0.5, &star);
            let k2 = nonlinear(1.0, &star)?;
            let mut out = combine(u, 0.5 * dt, &k1);
            heat_all(&mut out, full);
            for (o, k) in out.iter_mut().zip(&k2) {
                o.axpy(0.5 * dt, k);
            }
            Ok(out)
        }
        Scheme::Rk4 => {
            stage(1.0 / 6.0, u);
            let mut ua = combine(u, 0.5 * dt, &k1);
            heat_all(&mut ua, half);
            stage(1.0 / 3.0, &ua);
            let k2 = nonlinear(0.5, &ua)?;

            let mut ub: Vec<S> = u.to_vec();
            heat_all(&mut ub, half);
            for (o, k) in ub.iter_mut().zip(&k2) {
                o.axpy(0.5 * dt, k);
            }
            stage(1.0 / 3.0, &ub);
            let k3 = nonlinear(0.5, &ub)?;

            let mut k3h = k3.clone();
            heat_all(&mut k3h, half);
            let mut uc: Vec<S> = u.to_vec();
            heat_all(&mut uc, full);
            for (o, k) in uc.iter_mut().zip(&k3h) {
                o.axpy(dt, k);
            }
            stage(1.0 / 6.0, &uc);
            let k4 = nonlinear(1.0, &uc)?;

            let mut out = combine(u, dt / 6.0, &k1);
            heat_all(&mut out, full);
            let mut mid = combine(&k2, 1.0, &k3);
            heat_all(&mut mid, half);
            for ((o, m), k) in out.iter_mut().zip(&mid).zip(&k4) {
                o.axpy(dt / 3.0, m);
                o.axpy(dt / 6.0, k);
            }
            Ok(out)
        }
    }
}

/// Times and states sampled along a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub times: Vec<f64>,
    pub states: Vec<T>,
}

impl<T> Default for Trajectory<T> {
    fn default() -> Self {
        Self {
            times: Vec::new(),
            states: Vec::new(),
        }
    }
}

impl<T> Trajectory<T> {
    pub fn push(&mut self, t: f64, state: T) {
        self.times.push(t);
        self.states.push(state);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}
