//! Time series of block tables and the `L̃^r_T` norms over them.

use serde::{Deserialize, Serialize};

use super::besov::{BesovSpec, BlockTable};
use crate::error::{Error, Result};

/// Time exponent of a Chemin-Lerner norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TimeExponent {
    One,
    Two,
    Infinity,
}

impl TimeExponent {
    pub fn label(self) -> &'static str {
        match self {
            TimeExponent::One => "1",
            TimeExponent::Two => "2",
            TimeExponent::Infinity => "inf",
        }
    }
}

/// Block tables at increasing snapshot times.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NormTimeSeries {
    pub times: Vec<f64>,
    pub tables: Vec<BlockTable>,
}

impl NormTimeSeries {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, time: f64, table: BlockTable) -> Result<()> {
        if let Some(&last) = self.times.last() {
            if time <= last {
                return Err(Error::InvalidArgument(format!(
                    "snapshot time {time} does not follow {last}"
                )));
            }
            if table.grid != self.tables[0].grid {
                return Err(Error::GridMismatch);
            }
        }
        self.times.push(time);
        self.tables.push(table);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `sup_t ‖f(t)‖_X` over the snapshots.
    pub fn sup_norm(&self, spec: &BesovSpec) -> Result<f64> {
        if self.is_empty() {
            return Err(Error::Empty("norm time series"));
        }
        Ok(self.tables.iter().map(|t| t.besov(spec)).fold(0.0, f64::max))
    }

    /// `‖f(t_i)‖_X` per snapshot.
    pub fn pointwise(&self, spec: &BesovSpec) -> Vec<f64> {
        self.tables.iter().map(|t| t.besov(spec)).collect()
    }
}

/// Trapezoid weights for the (possibly nonuniform) nodes `t`.
pub(crate) fn trapezoid_weights(t: &[f64]) -> Vec<f64> {
    let n = t.len();
    let mut w = vec![0.0; n];
    for i in 0..n.saturating_sub(1) {
        let h = t[i + 1] - t[i];
        w[i] += 0.5 * h;
        w[i + 1] += 0.5 * h;
    }
    w
}

/// `‖f‖_{L̃^r([t_lo, t_hi]; X)}` on the snapshot window `lo..=hi`.
pub fn chemin_lerner_window(
    series: &NormTimeSeries,
    r: TimeExponent,
    spec: &BesovSpec,
    lo: usize,
    hi: usize,
) -> Result<f64> {
    if series.is_empty() {
        return Err(Error::Empty("norm time series"));
    }
    if hi >= series.len() || lo > hi {
        return Err(Error::InvalidArgument(format!(
            "window {lo}..={hi} outside {} snapshots",
            series.len()
        )));
    }
    if r != TimeExponent::Infinity && hi == lo && series.len() < 2 {
        return Err(Error::InvalidArgument(
            "time integrals need at least two snapshots".into(),
        ));
    }
    let tables = &series.tables[lo..=hi];
    let weights = trapezoid_weights(&series.times[lo..=hi]);
    let first = &tables[0];
    let mut total = 0.0;
    for (w, slot) in first.weighted_blocks(spec) {
        let values = tables.iter().map(|t| t.energies(spec.kind)[slot]);
        let time_norm = match r {
            TimeExponent::Infinity => values.map(f64::sqrt).fold(0.0, f64::max),
            TimeExponent::One => values.zip(&weights).map(|(e, q)| q * e.sqrt()).sum(),
            TimeExponent::Two => values.zip(&weights).map(|(e, q)| q * e).sum::<f64>().sqrt(),
        };
        total += w * time_norm;
    }
    Ok(total)
}

/// `‖f‖_{L̃^r([0,T]; X)}` over the whole series. The time norm is taken per
/// block before the dyadic sum.
pub fn chemin_lerner_norm(series: &NormTimeSeries, r: TimeExponent, spec: &BesovSpec) -> Result<f64> {
    if series.is_empty() {
        return Err(Error::Empty("norm time series"));
    }
    if r != TimeExponent::Infinity && series.len() < 2 {
        return Err(Error::InvalidArgument(
            "time integrals need at least two snapshots".into(),
        ));
    }
    chemin_lerner_window(series, r, spec, 0, series.len() - 1)
}

/// `∫ ‖f(t)‖_X dt` (trapezoid), i.e. the plain `L¹_T X` norm.
pub fn l1_time_norm(series: &NormTimeSeries, spec: &BesovSpec) -> Result<f64> {
    if series.len() < 2 {
        return Err(Error::Empty("norm time series"));
    }
    let w = trapezoid_weights(&series.times);
    Ok(series.pointwise(spec).iter().zip(&w).map(|(v, q)| v * q).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Grid, SpectralField};

    #[test]
    fn decaying_mode_matches_closed_form() {
        let g = Grid::new(4, 16, 0).unwrap();
        let f = SpectralField::from_fn(g, |_, _, z| (4.0 * z).sin());
        let base = BlockTable::of_field(&f);
        let n = 1000;
        let mut s = NormTimeSeries::new();
        for i in 0..=n {
            let t = i as f64 / n as f64;
            let mut tab = base.clone();
            for e in tab.vertical.iter_mut().chain(tab.anisotropic.iter_mut()) {
                *e *= (-2.0 * t).exp();
            }
            s.push(t, tab).unwrap();
        }
        let spec = BesovSpec::vertical(0.5);
        let got = chemin_lerner_norm(&s, TimeExponent::Two, &spec).unwrap();
        let want = 2f64.sqrt() * f.l2_norm() * ((1.0 - (-2f64).exp()) / 2.0).sqrt();
        assert!((got - want).abs() < 1e-4 * want);
    }

    #[test]
    fn rejects_empty_and_unordered() {
        let s = NormTimeSeries::new();
        let spec = BesovSpec::vertical(0.5);
        assert!(chemin_lerner_norm(&s, TimeExponent::Infinity, &spec).is_err());
        let g = Grid::cube(4).unwrap();
        let mut s = NormTimeSeries::new();
        s.push(1.0, BlockTable::zeros(g)).unwrap();
        assert!(s.push(1.0, BlockTable::zeros(g)).is_err());
        assert!(chemin_lerner_norm(&s, TimeExponent::Two, &spec).is_err());
        assert_eq!(chemin_lerner_norm(&s, TimeExponent::Infinity, &spec).unwrap(), 0.0);
    }
}
