//! Vertical and horizontal dyadic truncations.

use super::cutoff::{block_weight, lowpass_weight};
use crate::spectral::{Axis, Grid, SpectralField};

/// Direction of a dyadic decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Direction {
    /// Vertical frequency `|ξ₃|`.
    Vertical,
    /// Horizontal frequency `|ξ_h|`.
    Horizontal,
}

/// Inclusive range of dyadic indices with a nonzero block on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockRange {
    pub min: i32,
    pub max: i32,
}

impl BlockRange {
    pub fn len(&self) -> usize {
        (self.max - self.min + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.max < self.min
    }

    pub fn contains(&self, q: i32) -> bool {
        (self.min..=self.max).contains(&q)
    }

    pub fn iter(&self) -> impl Iterator<Item = i32> {
        self.min..=self.max
    }
}

/// True vertical frequency magnitudes per storage index.
pub(crate) fn vertical_magnitudes(g: Grid) -> Vec<f64> {
    g.wavenumbers(Axis::X3).iter().map(|k| k.abs()).collect()
}

/// True `|ξ_h|` per `(i1, i2)`, flattened as `i1 * n_h + i2`.
pub(crate) fn horizontal_magnitudes(g: Grid) -> Vec<f64> {
    let k = g.wavenumbers(Axis::X1);
    let mut out = Vec::with_capacity(k.len() * k.len());
    for a in &k {
        for b in &k {
            out.push((a * a + b * b).sqrt());
        }
    }
    out
}

fn range_for(mags: &[f64]) -> BlockRange {
    let nonzero: Vec<f64> = mags.iter().copied().filter(|r| *r > 0.0).collect();
    let lo = nonzero.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = nonzero.iter().copied().fold(0.0, f64::max);
    let start = lo.log2().floor() as i32 - 2;
    let end = hi.log2().ceil() as i32;
    let live: Vec<i32> = (start..=end)
        .filter(|&q| nonzero.iter().any(|&r| block_weight(q, r) != 0.0))
        .collect();
    BlockRange {
        min: *live.first().expect("grid has nonzero frequencies"),
        max: *live.last().expect("grid has nonzero frequencies"),
    }
}

/// Indices `q` whose block can be nonzero on `grid`.
pub fn block_range(grid: Grid, dir: Direction) -> BlockRange {
    match dir {
        Direction::Vertical => range_for(&vertical_magnitudes(grid)),
        Direction::Horizontal => range_for(&horizontal_magnitudes(grid)),
    }
}

fn apply_radial(f: &SpectralField, dir: Direction, w: impl Fn(f64) -> f64 + Sync) -> SpectralField {
    let g = f.grid();
    match dir {
        Direction::Vertical => {
            let table: Vec<f64> = vertical_magnitudes(g).into_iter().map(&w).collect();
            f.scaled_by(|_, _, c| table[c])
        }
        Direction::Horizontal => {
            let n_h = g.n_h();
            let table: Vec<f64> = horizontal_magnitudes(g).into_iter().map(&w).collect();
            f.scaled_by(|a, b, _| table[a * n_h + b])
        }
    }
}

/// `Δ_qᵛ f`.
pub fn vertical_block(f: &SpectralField, q: i32) -> SpectralField {
    apply_radial(f, Direction::Vertical, |r| block_weight(q, r))
}

/// `S_qᵛ f` (contains the `ξ₃ = 0` plane).
pub fn vertical_lowpass(f: &SpectralField, q: i32) -> SpectralField {
    apply_radial(f, Direction::Vertical, |r| lowpass_weight(q, r))
}

/// `Δ_jʰ f`.
pub fn horizontal_block(f: &SpectralField, j: i32) -> SpectralField {
    apply_radial(f, Direction::Horizontal, |r| block_weight(j, r))
}

/// `S_jʰ f`.
pub fn horizontal_lowpass(f: &SpectralField, j: i32) -> SpectralField {
    apply_radial(f, Direction::Horizontal, |r| lowpass_weight(j, r))
}

/// Zero-frequency part along the decomposed direction.
pub fn mean_part(f: &SpectralField, dir: Direction) -> SpectralField {
    apply_radial(f, dir, |r| if r == 0.0 { 1.0 } else { 0.0 })
}

/// A field split into its mean part and its nonzero dyadic blocks.
#[derive(Debug, Clone)]
pub struct DyadicDecomposition {
    pub direction: Direction,
    pub mean: SpectralField,
    pub blocks: Vec<(i32, SpectralField)>,
}

impl DyadicDecomposition {
    pub fn new(f: &SpectralField, direction: Direction) -> Self {
        let range = block_range(f.grid(), direction);
        let blocks = range
            .iter()
            .map(|q| {
                let b = match direction {
                    Direction::Vertical => vertical_block(f, q),
                    Direction::Horizontal => horizontal_block(f, q),
                };
                (q, b)
            })
            .collect();
        Self {
            direction,
            mean: mean_part(f, direction),
            blocks,
        }
    }

    pub fn block(&self, q: i32) -> Option<&SpectralField> {
        self.blocks.iter().find(|(k, _)| *k == q).map(|(_, b)| b)
    }

    /// Mean plus all blocks.
    pub fn reconstruct(&self) -> SpectralField {
        let mut out = self.mean.clone();
        for (_, b) in &self.blocks {
            out += b;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use super::super::cutoff::chi;

    #[test]
    fn sin4_sits_in_one_block() {
        let g = Grid::new(4, 32, 0).unwrap();
        let f = SpectralField::from_fn(g, |_, _, z| (4.0 * z).sin());
        let d = DyadicDecomposition::new(&f, Direction::Vertical);
        for (q, b) in &d.blocks {
            if *q == 1 {
                assert!(b.max_coeff_diff(&f) < 1e-15);
            } else {
                assert!(b.max_coeff() < 1e-15, "block {q}");
            }
        }
    }

    #[test]
    fn sin3_splits_between_two_blocks() {
        let g = Grid::new(4, 32, 0).unwrap();
        let f = SpectralField::from_fn(g, |_, _, z| (3.0 * z).sin());
        let b0 = vertical_block(&f, 0);
        let b1 = vertical_block(&f, 1);
        let w0 = chi(1.5) - chi(3.0);
        let w1 = chi(0.75) - chi(1.5);
        assert!((w0 + w1 - 1.0).abs() < 1e-15);
        assert!(b0.max_coeff_diff(&(&f * w0)) < 1e-15);
        assert!(b1.max_coeff_diff(&(&f * w1)) < 1e-15);
    }

    #[test]
    fn stretched_range_reaches_fundamental() {
        let g = Grid::new(8, 16, 2).unwrap();
        let r = block_range(g, Direction::Vertical);
        // |ξ₃| runs from 1/4 to 2.
        assert_eq!(r.min, -3);
        assert_eq!(r.max, 0);
    }
}
