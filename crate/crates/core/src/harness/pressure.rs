//! Size of the pressure terms of the approximate solution along a run.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lp::{l1_time_norm, BesovSpec, BlockTable, NormTimeSeries};
use crate::solvers::{compute_pressures, ApproxSnapshot, Trajectory};
use crate::spectral::{derivative, slowly_varying_embed, Axis};

/// `L¹_T B^{0,1/2}` norms of `[∂₃p₀]_ε`, `[∂₃p₁,ₕ]_ε` and `[∇ʰp₁,₃]_ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PressureReport {
    pub m: u32,
    pub d3_p0: f64,
    pub d3_p1h: f64,
    pub gradh_p13: f64,
}

impl PressureReport {
    pub fn all_finite(&self) -> bool {
        [self.d3_p0, self.d3_p1h, self.gradh_p13].iter().all(|v| v.is_finite())
    }
}

pub fn verify_pressure_bounds(traj: &Trajectory<ApproxSnapshot>, m: u32) -> Result<PressureReport> {
    let mut series = [NormTimeSeries::new(), NormTimeSeries::new(), NormTimeSeries::new()];
    for (&t, s) in traj.times.iter().zip(&traj.states) {
        let p = compute_pressures(&s.uh, &s.w3)?;
        let e = |f| slowly_varying_embed(&f, m);
        let fields = [
            vec![e(derivative(&p.p0, Axis::X3))?],
            vec![e(derivative(&p.p1h, Axis::X3))?],
            vec![e(derivative(&p.p13, Axis::X1))?, e(derivative(&p.p13, Axis::X2))?],
        ];
        for (ser, f) in series.iter_mut().zip(&fields) {
            ser.push(t, BlockTable::of_vector(f, crate::lp::ModeWeight::Identity))?;
        }
    }
    let spec = BesovSpec::vertical(0.5);
    Ok(PressureReport {
        m,
        d3_p0: l1_time_norm(&series[0], &spec)?,
        d3_p1h: l1_time_norm(&series[1], &spec)?,
        gradh_p13: l1_time_norm(&series[2], &spec)?,
    })
}
