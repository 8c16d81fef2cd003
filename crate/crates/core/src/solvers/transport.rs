//! The scalar equation `∂_t w³ + uʰ·∇ʰw³ − Δ_h w³ = 0` for the vertical
//! component of the correction, alone or coupled with the slice ensemble.

use super::slices::{
    max_speed, neg_div_h, ns2d_nonlinear, ns2d_time_derivative, pointwise, prepare_slices,
    SliceEnsemble,
};
use super::stepping::{check_cfl, lawson_step, HeatFactors, StepperConfig, Trajectory};
use crate::error::{Error, Result};
use crate::spectral::ops::horizontal_mean_content;
use crate::spectral::{SliceField, SpectralField};

/// Relative `ξ_h = 0, ξ₃ ≠ 0` content of `w³` accepted as zero.
pub const MEAN_TOL: f64 = 1e-12;

/// `−div_h(uʰ w³)`, which equals `−uʰ·∇ʰw³` for divergence-free slices.
pub fn transport_nonlinear(uh: &[SliceField], w3: &SliceField, dealias: bool) -> SliceField {
    let g = w3.grid();
    let pw = w3.to_physical();
    let pu: Vec<Vec<f64>> = uh.iter().map(|c| c.to_physical()).collect();
    let f1 = SliceField::from_physical(g, &pointwise(&pu[0], &pw)).expect("grid sized");
    let f2 = SliceField::from_physical(g, &pointwise(&pu[1], &pw)).expect("grid sized");
    let mut out = neg_div_h(g, &f1, &f2);
    if dealias {
        out.dealias_in_place();
    }
    out
}

/// Content of `w³` on the plane `ξ_h = 0` away from `ξ₃ = 0`, relative to
/// the whole field.
pub fn vertical_shear_content(w3: &SpectralField) -> f64 {
    let mut shear = w3.clone();
    shear.set_mode(0, 0, 0, Default::default());
    let total = w3.coeff_energy();
    if total == 0.0 {
        0.0
    } else {
        horizontal_mean_content(&shear) * (shear.coeff_energy() / total).sqrt()
    }
}

fn check_w3(w3: &SpectralField) -> Result<()> {
    let content = vertical_shear_content(w3);
    if content > MEAN_TOL {
        return Err(Error::HorizontalMean { content });
    }
    Ok(())
}

/// Checks that `traj` holds one snapshot per step at times `n·dt`.
fn check_aligned<T>(traj: &Trajectory<T>, cfg: &StepperConfig) -> Result<()> {
    let n = cfg.n_steps();
    if traj.len() != n + 1 {
        return Err(Error::Misaligned(format!(
            "expected {} snapshots (one per step), got {}",
            n + 1,
            traj.len()
        )));
    }
    for (i, &t) in traj.times.iter().enumerate() {
        let expect = cfg.time_of(i);
        if (t - expect).abs() > 1e-9 * cfg.dt {
            return Err(Error::Misaligned(format!("snapshot {i} at t = {t}, expected {expect}")));
        }
    }
    Ok(())
}

/// `w³` driven by a stored slice trajectory sampled at every step. Stage
/// values of `uʰ` at half steps come from cubic Hermite interpolation using
/// the 2D right-hand side as the time derivative.
pub fn solve_transport_w3(
    uh_traj: &Trajectory<SliceEnsemble>,
    w3_0: &SpectralField,
    cfg: &StepperConfig,
) -> Result<Trajectory<SpectralField>> {
    cfg.validate()?;
    check_aligned(uh_traj, cfg)?;
    let g = w3_0.grid();
    if uh_traj.states[0].grid() != g {
        return Err(Error::GridMismatch);
    }
    check_w3(w3_0)?;
    let mut w = SliceField::from_spectral(w3_0);
    if cfg.dealias {
        w.dealias_in_place();
    }
    let full = HeatFactors::new(g, cfg.dt);
    let half = HeatFactors::new(g, 0.5 * cfg.dt);
    let mut out = Trajectory::default();
    out.push(0.0, w.to_spectral());
    let mut deriv_prev = ns2d_time_derivative(&uh_traj.states[0], cfg.dealias);
    for step in 1..=cfg.n_steps() {
        let (u0, u1) = (&uh_traj.states[step - 1], &uh_traj.states[step]);
        let deriv_next = ns2d_time_derivative(u1, cfg.dealias);
        let mid: Vec<SliceField> = (0..2)
            .map(|i| {
                let mut m = u0.uh[i].clone();
                m.axpy(1.0, &u1.uh[i]);
                m.scale(0.5);
                m.axpy(cfg.dt / 8.0, &deriv_prev[i]);
                m.axpy(-cfg.dt / 8.0, &deriv_next[i]);
                m
            })
            .collect();
        let speed = max_speed(&u0.uh.iter().map(|c| c.to_physical()).collect::<Vec<_>>());
        check_cfl(g, speed, cfg.dt, cfg.time_of(step - 1))?;
        let k1 = vec![transport_nonlinear(&u0.uh, &w, cfg.dealias)];
        let next = lawson_step(
            cfg.scheme,
            std::slice::from_ref(&w),
            k1,
            cfg.dt,
            &full,
            &half,
            |offset, s| {
                let uh: &[SliceField] = if offset < 1.0 { &mid } else { &u1.uh };
                Ok(vec![transport_nonlinear(uh, &s[0], cfg.dealias)])
            },
            |_, _| {},
        )?;
        w = next.into_iter().next().expect("one component");
        deriv_prev = deriv_next;
        if cfg.is_snapshot(step) {
            out.push(cfg.time_of(step), w.to_spectral());
        }
    }
    Ok(out)
}

/// The profiles `uʰ` and `w³` at one time, on the unit-period grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproxSnapshot {
    pub uh: [SpectralField; 2],
    pub w3: SpectralField,
}

/// Steps the slice ensemble and `w³` together, so that every stage of the
/// transport equation sees the matching stage of `uʰ`.
#[derive(Debug, Clone)]
pub struct ApproxSolver {
    cfg: StepperConfig,
    state: Vec<SliceField>,
    step: usize,
}

impl ApproxSolver {
    pub fn new(uh0: &[SpectralField; 2], w3_0: &SpectralField, cfg: StepperConfig) -> Result<Self> {
        cfg.validate()?;
        if uh0[0].grid() != w3_0.grid() || uh0[1].grid() != w3_0.grid() {
            return Err(Error::GridMismatch);
        }
        check_w3(w3_0)?;
        let uh = prepare_slices(&SliceEnsemble::from_spectral(uh0)?, cfg.dealias)?;
        let mut w = SliceField::from_spectral(w3_0);
        if cfg.dealias {
            w.dealias_in_place();
        }
        let [u1, u2] = uh;
        Ok(Self {
            cfg,
            state: vec![u1, u2, w],
            step: 0,
        })
    }

    pub fn config(&self) -> &StepperConfig {
        &self.cfg
    }

    pub fn time(&self) -> f64 {
        self.cfg.time_of(self.step)
    }

    pub fn is_done(&self) -> bool {
        self.step >= self.cfg.n_steps()
    }

    pub fn snapshot(&self) -> ApproxSnapshot {
        ApproxSnapshot {
            uh: [self.state[0].to_spectral(), self.state[1].to_spectral()],
            w3: self.state[2].to_spectral(),
        }
    }

    fn rhs(s: &[SliceField], dealias: bool) -> (Vec<SliceField>, f64) {
        let (mut n, speed) = ns2d_nonlinear(&s[..2], dealias);
        n.push(transport_nonlinear(&s[..2], &s[2], dealias));
        (n, speed)
    }

    pub fn step(&mut self) -> Result<()> {
        let g = self.state[0].grid();
        let dealias = self.cfg.dealias;
        let (k1, speed) = Self::rhs(&self.state, dealias);
        check_cfl(g, speed, self.cfg.dt, self.time())?;
        let full = HeatFactors::new(g, self.cfg.dt);
        let half = HeatFactors::new(g, 0.5 * self.cfg.dt);
        self.state = lawson_step(
            self.cfg.scheme,
            &self.state,
            k1,
            self.cfg.dt,
            &full,
            &half,
            |_, s| Ok(Self::rhs(s, dealias).0),
            |_, _| {},
        )?;
        self.step += 1;
        Ok(())
    }

    /// Runs to the end and returns the snapshots at the configured stride.
    pub fn run(mut self) -> Result<Trajectory<ApproxSnapshot>> {
        let mut traj = Trajectory::default();
        traj.push(self.time(), self.snapshot());
        while !self.is_done() {
            self.step()?;
            if self.cfg.is_snapshot(self.step) {
                traj.push(self.time(), self.snapshot());
            }
        }
        Ok(traj)
    }
}
