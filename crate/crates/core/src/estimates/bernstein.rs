//! Bernstein inequalities: direct, inverse (vertical ring) and horizontal.

use super::samples::{Band, Sample};
use super::{check_exponent, inv, lp_norm, RatioReport};
use crate::error::{Error, Result};
use crate::spectral::{derivative, Axis};

fn nonzero(s: &Sample) -> Result<()> {
    if s.field.max_coeff() == 0.0 {
        return Err(Error::InvalidArgument("zero sample".into()));
    }
    Ok(())
}

fn fmt_p(p: f64) -> String {
    if p.is_infinite() {
        "inf".into()
    } else {
        format!("{p}")
    }
}

/// `‖∂₃^α a‖_{L^{p1}} / (2^{q(α + 1/p2 − 1/p1)} ‖a‖_{L^{p2}})` for samples
/// supported in `|ξ₃| ≤ 2^q`.
pub fn check_bernstein_vertical(q: i32, alpha: u32, p1: f64, p2: f64, samples: &[Sample]) -> Result<RatioReport> {
    check_exponent(p1)?;
    check_exponent(p2)?;
    if p2 > p1 {
        return Err(Error::InvalidArgument(format!("need p2 ≤ p1, got {p2} > {p1}")));
    }
    let band = Band::Ball {
        rh: f64::INFINITY,
        r3: (q as f64).exp2(),
    };
    let scale = (q as f64 * (alpha as f64 + inv(p2) - inv(p1))).exp2();
    let mut report = RatioReport::new(format!("bernstein_vertical(alpha={alpha},p1={},p2={})", fmt_p(p1), fmt_p(p2)));
    for s in samples {
        nonzero(s)?;
        band.require(&s.field)?;
        let mut d = s.field.clone();
        for _ in 0..alpha {
            d = derivative(&d, Axis::X3);
        }
        report.push(q, s.field.grid().dims(), s.seed, lp_norm(&d, p1), scale * lp_norm(&s.field, p2))?;
    }
    Ok(report)
}

/// `‖a‖_{L^p} / (2^{−q}‖∂₃a‖_{L^p})` for samples supported in the ring
/// `¾·2^q ≤ |ξ₃| ≤ 2^{q+1}`.
pub fn check_inverse_bernstein(q: i32, p: f64, samples: &[Sample]) -> Result<RatioReport> {
    check_exponent(p)?;
    let r = (q as f64).exp2();
    let band = Band::VerticalRing {
        rh: f64::INFINITY,
        lo: 0.75 * r,
        hi: 2.0 * r,
    };
    let mut report = RatioReport::new(format!("inverse_bernstein(p={})", fmt_p(p)));
    for s in samples {
        nonzero(s)?;
        band.require(&s.field)?;
        let d = derivative(&s.field, Axis::X3);
        report.push(q, s.field.grid().dims(), s.seed, lp_norm(&s.field, p), lp_norm(&d, p) / r)?;
    }
    Ok(report)
}

/// `‖a‖_{L^{p1}} / (2^{2j(1/p2 − 1/p1)}‖a‖_{L^{p2}})` for `x₃`-independent
/// samples supported in `|ξ_h| ≤ 2^j`.
pub fn check_bernstein_horizontal(j: i32, p1: f64, p2: f64, samples: &[Sample]) -> Result<RatioReport> {
    check_exponent(p1)?;
    check_exponent(p2)?;
    if p2 > p1 {
        return Err(Error::InvalidArgument(format!("need p2 ≤ p1, got {p2} > {p1}")));
    }
    let band = Band::Ball {
        rh: (j as f64).exp2(),
        r3: 0.0,
    };
    let scale = (2.0 * j as f64 * (inv(p2) - inv(p1))).exp2();
    let mut report = RatioReport::new(format!("bernstein_horizontal(p1={},p2={})", fmt_p(p1), fmt_p(p2)));
    for s in samples {
        nonzero(s)?;
        band.require(&s.field)?;
        report.push(j, s.field.grid().dims(), s.seed, lp_norm(&s.field, p1), scale * lp_norm(&s.field, p2))?;
    }
    Ok(report)
}
