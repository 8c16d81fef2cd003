/// Radial cutoff `χ`: 1 on `[0, 1]`, 0 from 2 on, quintic smoothstep in
/// between (C², monotone).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CutoffProfile;

impl CutoffProfile {
    #[inline]
    pub fn eval(self, t: f64) -> f64 {
        chi(t)
    }
}

#[inline]
pub fn chi(t: f64) -> f64 {
    let t = t.abs();
    if t <= 1.0 {
        1.0
    } else if t >= 2.0 {
        0.0
    } else {
        let x = t - 1.0;
        1.0 - x * x * x * (10.0 + x * (-15.0 + 6.0 * x))
    }
}

/// Multiplier of the dyadic block `q` at frequency magnitude `r`:
/// `χ(2^{-q-1} r) − χ(2^{-q} r)`, supported in `(2^q, 2^{q+2})`.
#[inline]
pub fn block_weight(q: i32, r: f64) -> f64 {
    let s = (-(q as f64)).exp2();
    chi(0.5 * s * r) - chi(s * r)
}

/// Multiplier of the lowpass `S_q`: `χ(2^{-q} r)`.
#[inline]
pub fn lowpass_weight(q: i32, r: f64) -> f64 {
    chi((-(q as f64)).exp2() * r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_shape() {
        assert_eq!(chi(0.0), 1.0);
        assert_eq!(chi(1.0), 1.0);
        assert_eq!(chi(2.0), 0.0);
        assert!((chi(1.5) - 0.5).abs() < 1e-15);
        let mut prev = 1.0;
        for i in 0..=100 {
            let v = chi(1.0 + i as f64 / 100.0);
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn second_derivative_continuous_at_knots() {
        let h = 1e-4;
        let d2 = |t: f64| (chi(t + h) - 2.0 * chi(t) + chi(t - h)) / (h * h);
        assert!(d2(1.0 + 2.0 * h).abs() < 5e-2);
        assert!(d2(2.0 - 2.0 * h).abs() < 5e-2);
    }

    #[test]
    fn blocks_telescope() {
        for r in [0.3, 1.0, 3.0, 7.9, 40.0] {
            let sum: f64 = (-6..8).map(|q| block_weight(q, r)).sum();
            assert!((sum - 1.0).abs() < 1e-14, "r = {r}");
        }
        assert_eq!(block_weight(1, 4.0), 1.0);
        assert_eq!(block_weight(0, 4.0), 0.0);
        assert_eq!(block_weight(2, 4.0), 0.0);
    }
}
