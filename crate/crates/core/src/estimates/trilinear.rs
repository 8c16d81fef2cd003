//! Trilinear block estimates measured along a trajectory. The left sides
//! are accumulated snapshot by snapshot, so the fields never need to be
//! stored.

use serde::{Deserialize, Serialize};

use super::{block_pairing, time_integral, RatioReport};
use crate::error::{Error, Result};
use crate::lp::{
    block_range, chemin_lerner_window, BesovSpec, BlockRange, BlockTable, Direction, ModeWeight, NormTimeSeries,
    TimeExponent,
};
use crate::spectral::{advect, derivative, divergence, product, relative_divergence, Axis, Grid, SpectralField};

/// Divergence accepted for the advecting field, relative to `|ξ|·|û|` or,
/// for fields at roundoff size such as the remainder at `t = 0`, absolute.
pub const DIV_TOL: f64 = 1e-10;

fn check_divergence(u: &[SpectralField; 3]) -> Result<()> {
    let rel = relative_divergence(u);
    let abs = divergence(u).max_coeff();
    if rel > DIV_TOL && abs > DIV_TOL {
        return Err(Error::NotDivergenceFree(rel));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrilinearKind {
    /// `|(Δ_q(u·∇u) | Δ_q u)|` against `‖∇ʰu‖²_{L̃²B^{0,1/2}} ‖u‖_{L̃^∞B^{0,1/2}}`.
    RR,
    /// `|(Δ_q(u·∇v) | Δ_q v)|` against the mixed product of `u` and `v` norms.
    UR,
    /// `|(Δ_q(u³v) | ∂₃Δ_q u)|` against
    /// `(‖u‖_{L̃^∞B^{0,1/2}}‖∂₃v‖_{L̃¹𝓑^{1,1/2}} + ‖∇ʰu‖_{L̃²B^{0,1/2}}‖v‖_{L̃²𝓑^{1,1/2}}) ‖u‖_{L̃^∞B^{0,1/2}}`.
    Jq,
}

impl TrilinearKind {
    pub fn id(self) -> &'static str {
        match self {
            TrilinearKind::RR => "trilinear_rr",
            TrilinearKind::UR => "trilinear_ur",
            TrilinearKind::Jq => "trilinear_jq",
        }
    }
}

/// Per-snapshot left sides and block tables of one trilinear check.
#[derive(Debug, Clone)]
pub struct TrilinearFields {
    pub kind: TrilinearKind,
    pub grid: Grid,
    pub q_range: BlockRange,
    pub times: Vec<f64>,
    /// `lhs[i][q − q_min]` at snapshot `i`.
    pub lhs: Vec<Vec<f64>>,
    u_plain: NormTimeSeries,
    u_grad: NormTimeSeries,
    v_plain: NormTimeSeries,
    v_grad: NormTimeSeries,
    v_d3: NormTimeSeries,
}

fn components(u: &[SpectralField; 3], f: impl Fn(usize) -> Result<SpectralField>) -> Result<Vec<SpectralField>> {
    (0..u.len()).map(f).collect()
}

impl TrilinearFields {
    pub fn new(kind: TrilinearKind, grid: Grid) -> Self {
        Self {
            kind,
            grid,
            q_range: block_range(grid, Direction::Vertical),
            times: Vec::new(),
            lhs: Vec::new(),
            u_plain: NormTimeSeries::new(),
            u_grad: NormTimeSeries::new(),
            v_plain: NormTimeSeries::new(),
            v_grad: NormTimeSeries::new(),
            v_d3: NormTimeSeries::new(),
        }
    }

    /// Adds a snapshot. `v` is ignored for [`TrilinearKind::RR`] and
    /// required otherwise.
    pub fn record(&mut self, t: f64, u: &[SpectralField; 3], v: Option<&[SpectralField; 3]>) -> Result<()> {
        if u[0].grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        check_divergence(u)?;
        let v = match (self.kind, v) {
            (TrilinearKind::RR, _) => u,
            (_, Some(v)) => v,
            (_, None) => return Err(Error::InvalidArgument("this trilinear kind needs a second field".into())),
        };
        if v[0].grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        let (term, paired): (Vec<SpectralField>, Vec<SpectralField>) = match self.kind {
            TrilinearKind::RR | TrilinearKind::UR => (components(v, |i| advect(u, &v[i]))?, v.to_vec()),
            TrilinearKind::Jq => (
                components(v, |i| product(&u[2], &v[i]))?,
                u.iter().map(|c| derivative(c, Axis::X3)).collect(),
            ),
        };
        let row = self.q_range.iter().map(|q| block_pairing(&term, &paired, q).abs()).collect();
        self.u_plain.push(t, BlockTable::of_vector(u, ModeWeight::Identity))?;
        self.u_grad.push(t, BlockTable::of_vector(u, ModeWeight::HorizontalGradient))?;
        if self.kind != TrilinearKind::RR {
            self.v_plain.push(t, BlockTable::of_vector(v, ModeWeight::Identity))?;
            self.v_grad.push(t, BlockTable::of_vector(v, ModeWeight::HorizontalGradient))?;
        }
        if self.kind == TrilinearKind::Jq {
            self.v_d3.push(t, BlockTable::of_vector(v, ModeWeight::VerticalDerivative))?;
        }
        self.times.push(t);
        self.lhs.push(row);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    fn window(&self, interval: (f64, f64)) -> Result<(usize, usize)> {
        let tol = 1e-9 * (1.0 + interval.1.abs());
        let inside: Vec<usize> = (0..self.len())
            .filter(|&i| self.times[i] >= interval.0 - tol && self.times[i] <= interval.1 + tol)
            .collect();
        match (inside.first(), inside.last()) {
            (Some(&lo), Some(&hi)) if hi > lo => Ok((lo, hi)),
            _ => Err(Error::InvalidArgument(format!(
                "interval [{}, {}] holds fewer than two snapshots",
                interval.0, interval.1
            ))),
        }
    }
}

/// `2^q ∫_I LHS_q / RHS` for every block `q` with a nonzero left side.
/// The report's [`RatioReport::sqrt_sum`] is the quantity whose
/// finiteness mirrors the summability of the sequence `(s_q)`.
pub fn check_trilinear(fields: &TrilinearFields, interval: (f64, f64)) -> Result<RatioReport> {
    let (lo, hi) = fields.window(interval)?;
    let b = BesovSpec::vertical(0.5);
    let a = BesovSpec::anisotropic(1.0, 0.5);
    let cl = |s: &NormTimeSeries, r, spec: &BesovSpec| chemin_lerner_window(s, r, spec, lo, hi);
    let u_inf = cl(&fields.u_plain, TimeExponent::Infinity, &b)?;
    let ug_2 = cl(&fields.u_grad, TimeExponent::Two, &b)?;
    let rhs = match fields.kind {
        TrilinearKind::RR => ug_2 * ug_2 * u_inf,
        TrilinearKind::UR => {
            let v_inf = cl(&fields.v_plain, TimeExponent::Infinity, &b)?;
            let vg_2 = cl(&fields.v_grad, TimeExponent::Two, &b)?;
            v_inf.sqrt() * vg_2 * ((vg_2 * u_inf * ug_2).sqrt() + ug_2 * v_inf.sqrt())
        }
        TrilinearKind::Jq => {
            let d3v_1 = cl(&fields.v_d3, TimeExponent::One, &a)?;
            let v_2 = cl(&fields.v_plain, TimeExponent::Two, &a)?;
            (u_inf * d3v_1 + ug_2 * v_2) * u_inf
        }
    };
    let times = &fields.times[lo..=hi];
    let mut report = RatioReport::new(fields.kind.id());
    for (slot, q) in fields.q_range.iter().enumerate() {
        let values: Vec<f64> = fields.lhs[lo..=hi].iter().map(|row| row[slot]).collect();
        let lhs = (q as f64).exp2() * time_integral(times, &values);
        if lhs == 0.0 {
            continue;
        }
        report.push(q, fields.grid.dims(), None, lhs, rhs)?;
    }
    Ok(report)
}
