//! Energy balance of single vertical blocks of the remainder:
//! `½‖Δ_qR(t₁)‖² − ½‖Δ_qR(t₀)‖² + ∫‖∇ʰΔ_qR‖² = −∫(transfer + forcing)`,
//! where transfer is `(Δ_q(R·∇R + u_app·∇R + R·∇u_app) | Δ_qR)` and
//! forcing is `(Δ_q f | Δ_qR)` with `f` the right-hand side left by
//! `u_app`.

use serde::{Deserialize, Serialize};

use super::{block_pairing, squared_block_weights, time_integral};
use crate::error::{Error, Result};
use crate::harness::{run_paired, GridSpec, InitialDataSpec};
use crate::lp::{block_range, Direction};
use crate::solvers::{uapp_forcing, StepperConfig};
use crate::spectral::{advect, Axis, Grid, SpectralField};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct BlockBalanceSample {
    /// `½‖Δ_qR‖²`
    pub energy: f64,
    /// `‖∇ʰΔ_qR‖²`
    pub dissipation: f64,
    pub transfer: f64,
    pub forcing: f64,
}

/// Block balance terms at every recorded time for a fixed set of blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockBalanceTrace {
    pub grid: Grid,
    pub q_values: Vec<i32>,
    pub times: Vec<f64>,
    /// `samples[i][k]` is block `q_values[k]` at `times[i]`.
    pub samples: Vec<Vec<BlockBalanceSample>>,
}

fn horizontal_block_dissipation(r: &[SpectralField], q: i32) -> f64 {
    let g = r[0].grid();
    let w = squared_block_weights(g, q);
    let k1 = g.deriv_wavenumbers(Axis::X1);
    let n_v = g.n_v();
    let mut s = 0.0;
    for c in r {
        for (idx, x) in c.coeffs().iter().enumerate() {
            let wq = w[idx % n_v];
            if wq == 0.0 {
                continue;
            }
            let (a, b, _) = g.unravel(idx);
            s += wq * (k1[a] * k1[a] + k1[b] * k1[b]) * x.norm_sqr();
        }
    }
    g.volume() * s
}

impl BlockBalanceTrace {
    pub fn new(grid: Grid, q_values: Vec<i32>) -> Result<Self> {
        let range = block_range(grid, Direction::Vertical);
        if let Some(q) = q_values.iter().find(|q| !range.contains(**q)) {
            return Err(Error::InvalidArgument(format!(
                "block {q} outside the grid range {}..={}",
                range.min, range.max
            )));
        }
        Ok(Self {
            grid,
            q_values,
            times: Vec::new(),
            samples: Vec::new(),
        })
    }

    /// Adds the terms at time `t`. Without `uapp` only `R·∇R` transfers
    /// energy; without `forcing` the forcing bracket is zero.
    pub fn record(
        &mut self,
        t: f64,
        r: &[SpectralField; 3],
        uapp: Option<&[SpectralField; 3]>,
        forcing: Option<&[SpectralField; 3]>,
    ) -> Result<()> {
        if r[0].grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        if let Some(&last) = self.times.last() {
            if t <= last {
                return Err(Error::InvalidArgument(format!("time {t} does not follow {last}")));
            }
        }
        let mut transfer = Vec::with_capacity(3);
        for c in r {
            let mut n = advect(r, c)?;
            if let Some(a) = uapp {
                n += &advect(a, c)?;
            }
            transfer.push(n);
        }
        if let Some(a) = uapp {
            for (n, c) in transfer.iter_mut().zip(a) {
                *n += &advect(r, c)?;
            }
        }
        let row = self
            .q_values
            .iter()
            .map(|&q| BlockBalanceSample {
                energy: 0.5 * block_pairing(r, r, q),
                dissipation: horizontal_block_dissipation(r, q),
                transfer: block_pairing(&transfer, r, q),
                forcing: forcing.map_or(0.0, |f| block_pairing(f, r, q)),
            })
            .collect();
        self.times.push(t);
        self.samples.push(row);
        Ok(())
    }
}

/// Records the block terms of `Rᵉ = uᵉ − u_app` at every snapshot of a
/// paired run.
pub fn block_balance_trace(
    data: &InitialDataSpec,
    grid: GridSpec,
    m: u32,
    stepper: StepperConfig,
    q_values: &[i32],
) -> Result<BlockBalanceTrace> {
    let g = Grid::new(grid.n_h, grid.n_v, m)?;
    let mut trace = BlockBalanceTrace::new(g, q_values.to_vec())?;
    run_paired(data, grid, m, stepper, |s| {
        let r = s.remainder();
        let f = uapp_forcing(s.approx, s.m)?;
        trace.record(s.time, &r, Some(&s.uapp.components), Some(&f))
    })?;
    Ok(trace)
}

/// The integrated balance of one block over an interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BalanceResidual {
    pub q: i32,
    pub t0: f64,
    pub t1: f64,
    pub delta_energy: f64,
    pub dissipation: f64,
    pub transfer: f64,
    pub forcing: f64,
    /// `|ΔE + ∫dissipation + ∫transfer + ∫forcing|` over the largest of
    /// the four magnitudes (zero when all vanish).
    pub residual: f64,
}

pub fn check_block_energy_balance(trace: &BlockBalanceTrace, q: i32, interval: (f64, f64)) -> Result<BalanceResidual> {
    let k = trace
        .q_values
        .iter()
        .position(|&x| x == q)
        .ok_or_else(|| Error::InvalidArgument(format!("block {q} was not recorded")))?;
    let tol = 1e-9 * (1.0 + interval.1.abs());
    let idx: Vec<usize> = (0..trace.times.len())
        .filter(|&i| trace.times[i] >= interval.0 - tol && trace.times[i] <= interval.1 + tol)
        .collect();
    if idx.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "interval [{}, {}] holds fewer than two snapshots",
            interval.0, interval.1
        )));
    }
    let (lo, hi) = (idx[0], idx[idx.len() - 1]);
    let times = &trace.times[lo..=hi];
    let column = |f: fn(&BlockBalanceSample) -> f64| -> Vec<f64> {
        trace.samples[lo..=hi].iter().map(|row| f(&row[k])).collect()
    };
    let delta_energy = trace.samples[hi][k].energy - trace.samples[lo][k].energy;
    let dissipation = time_integral(times, &column(|s| s.dissipation));
    let transfer = time_integral(times, &column(|s| s.transfer));
    let forcing = time_integral(times, &column(|s| s.forcing));
    let scale = [delta_energy.abs(), dissipation, transfer.abs(), forcing.abs()]
        .into_iter()
        .fold(0.0, f64::max);
    let sum = delta_energy + dissipation + transfer + forcing;
    Ok(BalanceResidual {
        q,
        t0: times[0],
        t1: times[times.len() - 1],
        delta_energy,
        dissipation,
        transfer,
        forcing,
        residual: if scale == 0.0 { 0.0 } else { sum.abs() / scale },
    })
}
