//! Greedy time partition on which `u_app` is small in the norms that drive
//! the remainder estimate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{chemin_lerner_window, BesovSpec, NormTimeSeries, TimeExponent};

/// Chunk boundaries `t₀ < … < t_K` and the product value on each chunk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub times: Vec<f64>,
    pub products: Vec<f64>,
    pub bound: f64,
}

impl Partition {
    pub fn k(&self) -> usize {
        self.products.len()
    }

    pub fn all_within_bound(&self) -> bool {
        self.products.iter().all(|&p| p <= self.bound)
    }
}

/// `‖u‖_{L̃²(I; 𝓑^{1,1/2})}·(1 + ‖u‖_{L̃^∞(I; B^{0,1/2})})` on snapshots
/// `lo..=hi`.
pub fn chunk_product(series: &NormTimeSeries, lo: usize, hi: usize) -> Result<f64> {
    let l2 = chemin_lerner_window(series, TimeExponent::Two, &BesovSpec::anisotropic(1.0, 0.5), lo, hi)?;
    let linf = chemin_lerner_window(series, TimeExponent::Infinity, &BesovSpec::vertical(0.5), lo, hi)?;
    Ok(l2 * (1.0 + linf))
}

/// Scans left to right, extending each chunk while the product stays at
/// most `1/cbar` and cutting at the last snapshot that keeps it there.
pub fn time_partition(series: &NormTimeSeries, cbar: f64) -> Result<Partition> {
    if !(cbar > 0.0 && cbar.is_finite()) {
        return Err(Error::InvalidArgument(format!("Cbar must be positive, got {cbar}")));
    }
    let n = series.len();
    if n < 2 {
        return Err(Error::InvalidArgument("partition needs at least two snapshots".into()));
    }
    let bound = 1.0 / cbar;
    let mut times = vec![series.times[0]];
    let mut products = Vec::new();
    let mut lo = 0;
    while lo < n - 1 {
        let first = chunk_product(series, lo, lo + 1)?;
        if first > bound {
            return Err(Error::InvalidArgument(format!(
                "one snapshot interval at t = {} already gives {first:.3e} > 1/Cbar; refine the snapshots",
                series.times[lo]
            )));
        }
        let (mut hi, mut value) = (lo + 1, first);
        while hi + 1 < n {
            let next = chunk_product(series, lo, hi + 1)?;
            if next > bound {
                break;
            }
            hi += 1;
            value = next;
        }
        times.push(series.times[hi]);
        products.push(value);
        lo = hi;
    }
    Ok(Partition { times, products, bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::BlockTable;
    use crate::spectral::{Grid, SpectralField};

    fn constant_series(n: usize, t_end: f64) -> NormTimeSeries {
        let g = Grid::new(8, 16, 0).unwrap();
        let f = SpectralField::from_fn(g, |x, _, z| x.sin() * (4.0 * z).sin());
        let tab = BlockTable::of_field(&f);
        let mut s = NormTimeSeries::new();
        for i in 0..=n {
            s.push(t_end * i as f64 / n as f64, tab.clone()).unwrap();
        }
        s
    }

    #[test]
    fn whole_interval_when_small() {
        let s = constant_series(50, 1.0);
        let total = chunk_product(&s, 0, 50).unwrap();
        let p = time_partition(&s, 0.5 / total).unwrap();
        assert_eq!(p.k(), 1);
    }

    #[test]
    fn chunks_are_tight() {
        let s = constant_series(200, 2.0);
        let total = chunk_product(&s, 0, 200).unwrap();
        let p = time_partition(&s, 5.0 / total).unwrap();
        assert!(p.all_within_bound());
        let idx = |t: f64| s.times.iter().position(|&x| x == t).unwrap();
        for w in p.times.windows(2).take(p.k() - 1) {
            let (lo, hi) = (idx(w[0]), idx(w[1]));
            assert!(chunk_product(&s, lo, hi + 1).unwrap() > p.bound);
        }
    }
}
