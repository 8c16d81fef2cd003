//! Vertical paraproduct splitting of a product.

use super::blocks::{block_range, mean_part, vertical_block, vertical_lowpass, Direction};
use crate::error::Result;
use crate::spectral::SpectralField;

/// `a·b = T₁ + T₂ + R` with
/// `T₁ = Σ_q S_{q−1}a·Δ_q b`, `T₂ = Σ_q S_{q−1}b·Δ_q a` and
/// `R = Σ_{|q−q′|≤1} Δ_q a·Δ_{q′} b + ā·b̄` (bars: `ξ₃ = 0` parts).
#[derive(Debug, Clone)]
pub struct BonyParts {
    pub t1: SpectralField,
    pub t2: SpectralField,
    pub remainder: SpectralField,
}

impl BonyParts {
    pub fn sum(&self) -> SpectralField {
        let mut s = &self.t1 + &self.t2;
        s += &self.remainder;
        s
    }
}

/// Products are evaluated on the grid without truncation so the three parts
/// add up to the grid product of `a` and `b`.
pub fn bony_vertical_decompose(a: &SpectralField, b: &SpectralField) -> Result<BonyParts> {
    a.ensure_same_grid(b)?;
    let g = a.grid();
    let range = block_range(g, Direction::Vertical);
    let n = g.n_points();
    let blocks = |f: &SpectralField| -> Vec<Vec<f64>> {
        range.iter().map(|q| vertical_block(f, q).to_physical()).collect()
    };
    let (da, db) = (blocks(a), blocks(b));
    let (ma, mb) = (
        mean_part(a, Direction::Vertical).to_physical(),
        mean_part(b, Direction::Vertical).to_physical(),
    );
    let mut t1 = vec![0.0; n];
    let mut t2 = vec![0.0; n];
    let mut rem: Vec<f64> = ma.iter().zip(&mb).map(|(x, y)| x * y).collect();
    for (i, q) in range.iter().enumerate() {
        let sa = vertical_lowpass(a, q - 1).to_physical();
        let sb = vertical_lowpass(b, q - 1).to_physical();
        for p in 0..n {
            t1[p] += sa[p] * db[i][p];
            t2[p] += sb[p] * da[i][p];
        }
        for k in i.saturating_sub(1)..(i + 2).min(da.len()) {
            for p in 0..n {
                rem[p] += da[i][p] * db[k][p];
            }
        }
    }
    Ok(BonyParts {
        t1: SpectralField::from_physical(g, &t1)?,
        t2: SpectralField::from_physical(g, &t2)?,
        remainder: SpectralField::from_physical(g, &rem)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{raw_product, Grid};

    #[test]
    fn low_times_high_is_paraproduct() {
        let g = Grid::new(4, 128, 0).unwrap();
        let a = SpectralField::from_fn(g, |_, _, z| (4.0 * z).sin());
        let b = SpectralField::from_fn(g, |_, _, z| (32.0 * z).sin());
        let parts = bony_vertical_decompose(&a, &b).unwrap();
        let ab = raw_product(&a, &b).unwrap();
        assert!(parts.t1.max_coeff_diff(&ab) < 1e-14);
        assert!(parts.t2.max_coeff() < 1e-14);
        assert!(parts.remainder.max_coeff() < 1e-14);
    }
}
