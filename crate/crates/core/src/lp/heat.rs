//! Negative-regularity norms through the heat semigroup:
//! `‖ t^{−s/2} ‖e^{tΔ} f‖_{L^p} ‖_{L^r(dt/t)}`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::spectral::{fft_inverse_all, Axis, SpectralField};

/// Geometric sampling of the heat-flow time and the spatial oversampling
/// used for `L^p`, `p ≠ 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatFlowSampling {
    pub t_min: f64,
    pub t_max: f64,
    pub ratio: f64,
    pub oversample: usize,
}

impl Default for HeatFlowSampling {
    fn default() -> Self {
        Self {
            t_min: 1e-4,
            t_max: 1e2,
            ratio: 2f64.powf(0.125),
            oversample: 2,
        }
    }
}

impl HeatFlowSampling {
    pub fn times(&self) -> Vec<f64> {
        let n = ((self.t_max / self.t_min).ln() / self.ratio.ln()).floor() as usize;
        (0..=n).map(|i| self.t_min * self.ratio.powi(i as i32)).collect()
    }
}

/// Checks `times` is geometric and returns `ln(ratio)`.
fn log_step(times: &[f64]) -> Result<f64> {
    if times.is_empty() || times[0] <= 0.0 {
        return Err(Error::InvalidArgument("heat-flow times must be positive".into()));
    }
    if times.len() == 1 {
        return Ok(0.0);
    }
    let h = (times[1] / times[0]).ln();
    if h <= 0.0 {
        return Err(Error::InvalidArgument("heat-flow times must increase".into()));
    }
    for w in times.windows(2) {
        if ((w[1] / w[0]).ln() - h).abs() > 1e-9 * h {
            return Err(Error::InvalidArgument("heat-flow times are not geometric".into()));
        }
    }
    Ok(h)
}

/// `‖e^{tΔ} v‖_{L^p}` for every `t`, `v` a scalar or vector field
/// (pointwise Euclidean magnitude). `p = ∞` is the sup over the
/// oversampled grid.
pub fn heat_lp_profile(v: &[SpectralField], p: f64, times: &[f64], oversample: usize) -> Vec<f64> {
    let g = v[0].grid();
    let vol = g.volume();
    if p == 2.0 {
        let mags = true_sq_magnitudes(g);
        return times
            .iter()
            .map(|&t| {
                let e: f64 = v
                    .iter()
                    .flat_map(|f| f.coeffs().iter().zip(&mags))
                    .map(|(c, k2)| (-2.0 * t * k2).exp() * c.norm_sqr())
                    .sum();
                (vol * e).sqrt()
            })
            .collect();
    }
    let padded: Vec<SpectralField> = v.iter().map(|f| f.zero_padded(oversample)).collect();
    let fine = padded[0].grid();
    let mags = true_sq_magnitudes(fine);
    times
        .iter()
        .map(|&t| {
            let mut sq = vec![0.0; fine.n_points()];
            for f in &padded {
                let mut c: Vec<_> = f
                    .coeffs()
                    .par_iter()
                    .zip(mags.par_iter())
                    .map(|(c, k2)| c * (-t * k2).exp())
                    .collect();
                fft_inverse_all(&mut c, fine);
                sq.par_iter_mut().zip(c.par_iter()).for_each(|(s, c)| *s += c.re * c.re);
            }
            if p.is_infinite() {
                sq.iter().fold(0.0f64, |m, s| m.max(*s)).sqrt()
            } else {
                let mean: f64 = sq.iter().map(|s| s.powf(0.5 * p)).sum::<f64>() / sq.len() as f64;
                (vol * mean).powf(1.0 / p)
            }
        })
        .collect()
}

fn true_sq_magnitudes(g: crate::spectral::Grid) -> Vec<f64> {
    let k1 = g.wavenumbers(Axis::X1);
    let k3 = g.wavenumbers(Axis::X3);
    let mut out = Vec::with_capacity(g.n_points());
    for a in &k1 {
        for b in &k1 {
            for c in &k3 {
                out.push(a * a + b * b + c * c);
            }
        }
    }
    out
}

/// Discrete `L^r(dt/t)` norm of `t^{−s/2}‖e^{tΔ} v‖_{L^p}` on the geometric
/// grid `times` (log-trapezoid rule; `r = ∞` is the max). Requires `s < 0`.
pub fn heat_flow_norm(
    v: &[SpectralField],
    s: f64,
    p: f64,
    r: f64,
    times: &[f64],
    oversample: usize,
) -> Result<f64> {
    if s >= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "heat-flow characterization needs s < 0, got {s}"
        )));
    }
    if v.is_empty() {
        return Err(Error::Empty("heat-flow field"));
    }
    let h = log_step(times)?;
    let profile = heat_lp_profile(v, p, times, oversample);
    let vals: Vec<f64> = times
        .iter()
        .zip(&profile)
        .map(|(t, n)| t.powf(-0.5 * s) * n)
        .collect();
    if r.is_infinite() {
        return Ok(vals.iter().copied().fold(0.0, f64::max));
    }
    let last = vals.len() - 1;
    let integral: f64 = vals
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let w = if i == 0 || i == last { 0.5 * h } else { h };
            w * x.powf(r)
        })
        .sum();
    Ok(integral.powf(1.0 / r))
}
