//! The 3D system with horizontal viscosity only:
//! `∂_t u + P(u·∇u) = Δ_h u`, `div u = 0`.

use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use super::stepping::{check_cfl, lawson_step, HeatFactors, StepperConfig};
use crate::error::{Error, Result};
use crate::spectral::ops::{dealias_in_place, deriv_tables, leray_project_in_place};
use crate::spectral::{Axis, Grid, SpectralField, VelocityState};

/// Relative size of the mean mode above which initial data are rejected.
pub const MEAN_TOL: f64 = 1e-12;

const PAIRS: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];

fn pair_index(i: usize, j: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    PAIRS.iter().position(|&p| p == (a, b)).expect("valid pair")
}

/// `−P ∇·(u ⊗ u)` with the products truncated by the 2/3 rule, together
/// with `max |u|` on the grid.
pub fn nsh_nonlinear(u: &[SpectralField], dealias: bool) -> (Vec<SpectralField>, f64) {
    let g = u[0].grid();
    let phys: Vec<Vec<f64>> = u.iter().map(|c| c.to_physical()).collect();
    let max_speed = (0..g.n_points())
        .into_par_iter()
        .map(|p| (phys[0][p].powi(2) + phys[1][p].powi(2) + phys[2][p].powi(2)).sqrt())
        .reduce(|| 0.0, f64::max);
    let products: Vec<SpectralField> = PAIRS
        .iter()
        .map(|&(i, j)| {
            let prod: Vec<f64> = phys[i].par_iter().zip(phys[j].par_iter()).map(|(a, b)| a * b).collect();
            let mut f = SpectralField::from_physical(g, &prod).expect("grid sized product");
            if dealias {
                dealias_in_place(&mut f);
            }
            f
        })
        .collect();
    let mut out: [SpectralField; 3] = std::array::from_fn(|_| SpectralField::zeros(g));
    divergence_of_tensor(g, &products, &mut out);
    leray_project_in_place(&mut out);
    (out.into(), max_speed)
}

/// `out_i = −Σ_j ∂_j T_ij` for the symmetric tensor stored in [`PAIRS`] order.
fn divergence_of_tensor(g: Grid, t: &[SpectralField], out: &mut [SpectralField; 3]) {
    let k = deriv_tables(g);
    let (n_h, n_v) = (g.n_h(), g.n_v());
    for (i, o) in out.iter_mut().enumerate() {
        let tij: Vec<&[Complex64]> = (0..3).map(|j| t[pair_index(i, j)].coeffs()).collect();
        o.coeffs_mut()
            .par_chunks_mut(n_h * n_v)
            .enumerate()
            .for_each(|(a, plane)| {
                for b in 0..n_h {
                    for c in 0..n_v {
                        let idx = g.index(a, b, c);
                        let s = tij[0][idx] * k[0][a] + tij[1][idx] * k[1][b] + tij[2][idx] * k[2][c];
                        plane[b * n_v + c] = Complex64::new(s.im, -s.re);
                    }
                }
            });
    }
}

/// `∫ |∇ʰu|²` over the box.
pub fn horizontal_dissipation(u: &[SpectralField]) -> f64 {
    let g = u[0].grid();
    let k1 = g.deriv_wavenumbers(Axis::X1);
    let k2 = g.deriv_wavenumbers(Axis::X2);
    let n_v = g.n_v();
    let mut total = 0.0;
    for comp in u {
        for (col, cs) in comp.coeffs().chunks(n_v).enumerate() {
            let (a, b) = (col / g.n_h(), col % g.n_h());
            let kh2 = k1[a] * k1[a] + k2[b] * k2[b];
            if kh2 != 0.0 {
                total += kh2 * cs.iter().map(|c| c.norm_sqr()).sum::<f64>();
            }
        }
    }
    g.volume() * total
}

/// One step of the system from `state`. The state is not projected first;
/// only the nonlinear term is.
pub fn step_nsh(state: &VelocityState, cfg: &StepperConfig) -> Result<VelocityState> {
    cfg.validate()?;
    let g = state.grid();
    let (k1, speed) = nsh_nonlinear(&state.components, cfg.dealias);
    check_cfl(g, speed, cfg.dt, state.time)?;
    let full = HeatFactors::new(g, cfg.dt);
    let half = HeatFactors::new(g, 0.5 * cfg.dt);
    let next = lawson_step(
        cfg.scheme,
        &state.components,
        k1,
        cfg.dt,
        &full,
        &half,
        |_, u| Ok(nsh_nonlinear(u, cfg.dealias).0),
        |_, _| {},
    )?;
    let comps: [SpectralField; 3] = next.try_into().expect("three components");
    VelocityState::new(comps, state.time + cfg.dt)
}

/// Time stepper that also integrates the horizontal dissipation.
#[derive(Debug, Clone)]
pub struct NshSolver {
    cfg: StepperConfig,
    u: Vec<SpectralField>,
    step: usize,
    t0: f64,
    dissipated: f64,
}

impl NshSolver {
    /// Projects and truncates the initial data; rejects a nonzero mean.
    pub fn new(initial: &VelocityState, cfg: StepperConfig) -> Result<Self> {
        cfg.validate()?;
        let scale = initial
            .components
            .iter()
            .map(|c| c.max_coeff())
            .fold(0.0, f64::max);
        let mean = initial
            .components
            .iter()
            .map(|c| c.coeffs()[0].norm())
            .fold(0.0, f64::max);
        if scale > 0.0 && mean > MEAN_TOL * scale {
            return Err(Error::NonzeroMean(mean));
        }
        let mut u = initial.components.clone();
        leray_project_in_place(&mut u);
        if cfg.dealias {
            u.iter_mut().for_each(dealias_in_place);
        }
        Ok(Self {
            cfg,
            u: u.into(),
            step: 0,
            t0: initial.time,
            dissipated: 0.0,
        })
    }

    pub fn config(&self) -> &StepperConfig {
        &self.cfg
    }

    pub fn grid(&self) -> Grid {
        self.u[0].grid()
    }

    pub fn time(&self) -> f64 {
        self.t0 + self.cfg.time_of(self.step)
    }

    pub fn steps_taken(&self) -> usize {
        self.step
    }

    pub fn is_done(&self) -> bool {
        self.step >= self.cfg.n_steps()
    }

    pub fn components(&self) -> &[SpectralField] {
        &self.u
    }

    pub fn state(&self) -> VelocityState {
        let comps: [SpectralField; 3] = self.u.clone().try_into().expect("three components");
        VelocityState::new(comps, self.time()).expect("common grid")
    }

    /// `½‖u‖²`.
    pub fn energy(&self) -> f64 {
        0.5 * self.u.iter().map(|c| c.l2_norm().powi(2)).sum::<f64>()
    }

    /// `∫₀ᵗ ‖∇ʰu‖² ds`, integrated with the stepper's own stages.
    pub fn dissipated(&self) -> f64 {
        self.dissipated
    }

    pub fn step(&mut self) -> Result<()> {
        let dt = self.cfg.dt;
        let g = self.grid();
        let (k1, speed) = nsh_nonlinear(&self.u, self.cfg.dealias);
        check_cfl(g, speed, dt, self.time())?;
        let full = HeatFactors::new(g, dt);
        let half = HeatFactors::new(g, 0.5 * dt);
        let dealias = self.cfg.dealias;
        let mut diss = 0.0;
        let next = lawson_step(
            self.cfg.scheme,
            &self.u,
            k1,
            dt,
            &full,
            &half,
            |_, u| Ok(nsh_nonlinear(u, dealias).0),
            |w, u| diss += w * horizontal_dissipation(u),
        )?;
        self.u = next;
        self.dissipated += dt * diss;
        self.step += 1;
        Ok(())
    }

    /// Steps to the end, calling `on_snapshot` at step 0 and at every
    /// snapshot step.
    pub fn run(&mut self, mut on_snapshot: impl FnMut(&NshSolver) -> Result<()>) -> Result<()> {
        if self.step == 0 {
            on_snapshot(self)?;
        }
        while !self.is_done() {
            self.step()?;
            if self.cfg.is_snapshot(self.step) {
                on_snapshot(self)?;
            }
        }
        Ok(())
    }
}
