//! The 2D Navier-Stokes equations solved independently on every vertical
//! slice `x₃ = y₃` of the unit-period grid.

use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use super::stepping::{check_cfl, lawson_step, HeatFactors, StepperConfig, Trajectory};
use crate::error::{Error, Result};
use crate::spectral::{slice_leray_project, Axis, Grid, SliceField, SpectralField};

/// Relative 2D divergence accepted as zero.
pub const DIV_TOL: f64 = 1e-10;

/// Horizontal velocity on every slice.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceEnsemble {
    pub uh: [SliceField; 2],
}

impl SliceEnsemble {
    pub fn new(uh: [SliceField; 2]) -> Result<Self> {
        if uh[0].grid() != uh[1].grid() {
            return Err(Error::GridMismatch);
        }
        Ok(Self { uh })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            uh: [SliceField::zeros(grid), SliceField::zeros(grid)],
        }
    }

    pub fn from_spectral(uh: &[SpectralField; 2]) -> Result<Self> {
        Self::new([SliceField::from_spectral(&uh[0]), SliceField::from_spectral(&uh[1])])
    }

    pub fn to_spectral(&self) -> [SpectralField; 2] {
        [self.uh[0].to_spectral(), self.uh[1].to_spectral()]
    }

    pub fn grid(&self) -> Grid {
        self.uh[0].grid()
    }

    pub fn n_slices(&self) -> usize {
        self.grid().n_v()
    }

    pub fn permute_slices(&self, perm: &[usize]) -> Result<Self> {
        Ok(Self {
            uh: [self.uh[0].permute_slices(perm)?, self.uh[1].permute_slices(perm)?],
        })
    }

    /// Largest 2D divergence coefficient over all slices, relative to the
    /// largest `|ξ_h|·|û|`.
    pub fn relative_divergence(&self) -> f64 {
        let g = self.grid();
        let k1 = g.deriv_wavenumbers(Axis::X1);
        let k2 = g.deriv_wavenumbers(Axis::X2);
        let n_v = g.n_v();
        let (d0, d1) = (self.uh[0].data(), self.uh[1].data());
        let (mut div, mut scale) = (0.0f64, 0.0f64);
        for (idx, (x, y)) in d0.iter().zip(d1).enumerate() {
            let col = idx / n_v;
            let (a, b) = (col / g.n_h(), col % g.n_h());
            div = div.max((x * k1[a] + y * k2[b]).norm());
            let kn = (k1[a] * k1[a] + k2[b] * k2[b]).sqrt();
            scale = scale.max(kn * (x.norm_sqr() + y.norm_sqr()).sqrt());
        }
        if scale == 0.0 {
            0.0
        } else {
            div / scale
        }
    }

    /// `‖uʰ(·, y₃)‖²` on the horizontal torus, per slice.
    pub fn slice_energies(&self) -> Vec<f64> {
        per_slice_sum(&self.uh, |_| 1.0)
    }

    /// `‖∇ʰuʰ(·, y₃)‖²` per slice.
    pub fn slice_dissipation(&self) -> Vec<f64> {
        let g = self.grid();
        let k1 = g.deriv_wavenumbers(Axis::X1);
        let k2 = g.deriv_wavenumbers(Axis::X2);
        per_slice_sum(&self.uh, |col| {
            let (a, b) = (col / g.n_h(), col % g.n_h());
            k1[a] * k1[a] + k2[b] * k2[b]
        })
    }
}

/// `area · Σ_{ξ_h} weight(ξ_h)·|c|²` per slice.
pub(crate) fn per_slice_sum(fields: &[SliceField], weight: impl Fn(usize) -> f64) -> Vec<f64> {
    let g = fields[0].grid();
    let n_v = g.n_v();
    let area = g.len_h() * g.len_h();
    let mut out = vec![0.0; n_v];
    for f in fields {
        for (col, cs) in f.data().chunks(n_v).enumerate() {
            let w = weight(col);
            if w == 0.0 {
                continue;
            }
            for (o, c) in out.iter_mut().zip(cs) {
                *o += w * c.norm_sqr();
            }
        }
    }
    out.iter_mut().for_each(|o| *o *= area);
    out
}

pub(crate) fn max_speed(phys: &[Vec<f64>]) -> f64 {
    (0..phys[0].len())
        .into_par_iter()
        .map(|p| phys.iter().map(|c| c[p] * c[p]).sum::<f64>().sqrt())
        .reduce(|| 0.0, f64::max)
}

pub(crate) fn pointwise(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.par_iter().zip(b.par_iter()).map(|(x, y)| x * y).collect()
}

/// `−i(k₁ t₁ + k₂ t₂)`: minus the horizontal divergence of `(t₁, t₂)`.
pub(crate) fn neg_div_h(g: Grid, t1: &SliceField, t2: &SliceField) -> SliceField {
    let k1 = g.deriv_wavenumbers(Axis::X1);
    let k2 = g.deriv_wavenumbers(Axis::X2);
    let mut out = t1.mapped(|a, _| Complex64::new(0.0, -k1[a]));
    out.axpy_complex(t2, |_, b| Complex64::new(0.0, -k2[b]));
    out
}

/// `−P_h div_h(uʰ ⊗ uʰ)` per slice, with `max |uʰ|`.
pub fn ns2d_nonlinear(u: &[SliceField], dealias: bool) -> (Vec<SliceField>, f64) {
    let g = u[0].grid();
    let phys: Vec<Vec<f64>> = u.iter().map(|c| c.to_physical()).collect();
    let speed = max_speed(&phys);
    let fwd = |s: Vec<f64>| SliceField::from_physical(g, &s).expect("grid sized product");
    let t11 = fwd(pointwise(&phys[0], &phys[0]));
    let t12 = fwd(pointwise(&phys[0], &phys[1]));
    let t22 = fwd(pointwise(&phys[1], &phys[1]));
    let mut out = [neg_div_h(g, &t11, &t12), neg_div_h(g, &t12, &t22)];
    if dealias {
        out.iter_mut().for_each(SliceField::dealias_in_place);
    }
    slice_leray_project(&mut out);
    (out.into(), speed)
}

/// Full right-hand side `Δ_h uʰ − P_h div_h(uʰ ⊗ uʰ)`.
pub fn ns2d_time_derivative(u: &SliceEnsemble, dealias: bool) -> [SliceField; 2] {
    let (n, _) = ns2d_nonlinear(&u.uh, dealias);
    let g = u.grid();
    let k1 = g.deriv_wavenumbers(Axis::X1);
    let k2 = g.deriv_wavenumbers(Axis::X2);
    let lap = |f: &SliceField| f.mapped(|a, b| Complex64::new(-(k1[a] * k1[a] + k2[b] * k2[b]), 0.0));
    let mut out = [lap(&u.uh[0]), lap(&u.uh[1])];
    for (o, n) in out.iter_mut().zip(&n) {
        o.axpy(1.0, n);
    }
    out
}

/// Snapshots of a slice run together with the running per-slice integral
/// `∫₀ᵗ ‖∇ʰuʰ(·, y₃)‖² ds` at each snapshot.
#[derive(Debug, Clone, Default)]
pub struct SliceRun {
    pub trajectory: Trajectory<SliceEnsemble>,
    pub dissipated: Vec<Vec<f64>>,
}

/// Prepares slice data: rejects 2D-divergent slices, then projects and
/// truncates.
pub(crate) fn prepare_slices(initial: &SliceEnsemble, dealias: bool) -> Result<[SliceField; 2]> {
    let div = initial.relative_divergence();
    if div > DIV_TOL {
        return Err(Error::NotDivergenceFree(div));
    }
    let mut u = initial.uh.clone();
    if dealias {
        u.iter_mut().for_each(SliceField::dealias_in_place);
    }
    slice_leray_project(&mut u);
    Ok(u)
}

/// Integrates every slice independently; snapshots at the configured stride.
pub fn solve_ns2d_slices(initial: &SliceEnsemble, cfg: &StepperConfig) -> Result<SliceRun> {
    cfg.validate()?;
    let g = initial.grid();
    let mut u: Vec<SliceField> = prepare_slices(initial, cfg.dealias)?.into();
    let full = HeatFactors::new(g, cfg.dt);
    let half = HeatFactors::new(g, 0.5 * cfg.dt);
    let mut run = SliceRun::default();
    let mut dissipated = vec![0.0; g.n_v()];
    let snapshot = |u: &[SliceField]| SliceEnsemble {
        uh: [u[0].clone(), u[1].clone()],
    };
    run.trajectory.push(0.0, snapshot(&u));
    run.dissipated.push(dissipated.clone());
    for step in 1..=cfg.n_steps() {
        let t = cfg.time_of(step - 1);
        let (k1, speed) = ns2d_nonlinear(&u, cfg.dealias);
        check_cfl(g, speed, cfg.dt, t)?;
        let mut stage_diss = vec![0.0; g.n_v()];
        u = lawson_step(
            cfg.scheme,
            &u,
            k1,
            cfg.dt,
            &full,
            &half,
            |_, s| Ok(ns2d_nonlinear(s, cfg.dealias).0),
            |w, s| {
                let d = snapshot(s).slice_dissipation();
                stage_diss.iter_mut().zip(d).for_each(|(o, x)| *o += w * x);
            },
        )?;
        dissipated.iter_mut().zip(&stage_diss).for_each(|(o, x)| *o += cfg.dt * x);
        if cfg.is_snapshot(step) {
            run.trajectory.push(cfg.time_of(step), snapshot(&u));
            run.dissipated.push(dissipated.clone());
        }
    }
    Ok(run)
}
