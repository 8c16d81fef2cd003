//! The estimate bounding horizontal gradients and `L^∞_h L²_v` block norms
//! by `𝓑^{1,s}`, and the three anisotropic product laws.

use super::samples::Sample;
use super::RatioReport;
use crate::error::{Error, Result};
use crate::lp::{block_weight, BesovSpec, BlockTable, ModeWeight};
use crate::spectral::{fft_inverse_horizontal, raw_product, signed_index, Axis, SpectralField};

/// `sup_{x_h} ‖Δ_qᵛ f(x_h, ·)‖_{L²_v}` for every vertical slot of the
/// block table (slot 0 is the vertical mean). The horizontal sup is taken
/// on the grid refined twice.
pub fn linf_h_l2_v_blocks(f: &SpectralField) -> Vec<f64> {
    let table = BlockTable::zeros(f.grid());
    let fine = f.zero_padded(2);
    let g = fine.grid();
    let mut data = fine.into_coeffs();
    fft_inverse_horizontal(&mut data, g);
    let n_v = g.n_v();
    let k3: Vec<f64> = g.wavenumbers(Axis::X3).iter().map(|k| k.abs()).collect();
    let slots: Vec<Vec<f64>> = (0..table.n_q_slots())
        .map(|slot| match table.q_of_slot(slot) {
            None => k3.iter().map(|&k| if k == 0.0 { 1.0 } else { 0.0 }).collect(),
            Some(q) => k3.iter().map(|&k| if k == 0.0 { 0.0 } else { block_weight(q, k) }).collect(),
        })
        .collect();
    let len_v = g.len_v();
    let mut out = vec![0.0f64; slots.len()];
    for column in data.chunks(n_v) {
        for (o, w) in out.iter_mut().zip(&slots) {
            let e: f64 = column.iter().zip(w).map(|(c, w)| w * w * c.norm_sqr()).sum();
            *o = o.max((len_v * e).sqrt());
        }
    }
    out
}

/// `(Σ_q 2^{qs}‖∇ʰΔ_qᵛa‖_{L²} + Σ_q 2^{qs}‖Δ_qᵛa‖_{L^∞_h L²_v}, ‖a‖_{𝓑^{1,s}})`.
pub fn estimate11_sides(a: &SpectralField, s: f64) -> (f64, f64) {
    let spec = BesovSpec::vertical(s);
    let grad = BlockTable::of_fields(&[a], ModeWeight::HorizontalGradient);
    let plain = BlockTable::of_field(a);
    let sup_part: f64 = linf_h_l2_v_blocks(a)
        .iter()
        .enumerate()
        .map(|(slot, n)| plain.vertical_weight(slot, s) * n)
        .sum();
    (grad.besov(&spec) + sup_part, plain.besov(&BesovSpec::anisotropic(1.0, s)))
}

pub fn check_estimate11(index: i32, s: f64, samples: &[Sample]) -> Result<RatioReport> {
    let mut report = RatioReport::new(format!("estimate11(s={s})"));
    for smp in samples {
        let (lhs, rhs) = estimate11_sides(&smp.field, s);
        report.push(index, smp.field.grid().dims(), smp.seed, lhs, rhs)?;
    }
    Ok(report)
}

/// One report per product law.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductLawReports {
    /// `‖ab‖_{𝓑^{1,s}} / (‖a‖_{𝓑^{1,s}}‖b‖_{𝓑^{1,s}})`; empty when `s < 1/2`.
    pub algebra: RatioReport,
    /// `‖ab‖_{𝓑^{0,s}} / (‖a‖_{𝓑^{1/2,s}}‖b‖_{𝓑^{1/2,s}})`.
    pub half: RatioReport,
    /// `‖ab‖_{𝓑^{0,s}} / (‖a‖_{𝓑^{1,s}}‖b‖_{𝓑^{0,s}})`.
    pub mixed: RatioReport,
}

impl ProductLawReports {
    pub fn into_vec(self) -> Vec<RatioReport> {
        vec![self.algebra, self.half, self.mixed]
    }
}

/// Largest `|index|` carrying a nonzero coefficient, per axis.
fn extent(f: &SpectralField) -> [i64; 3] {
    let g = f.grid();
    let mut out = [0i64; 3];
    for (idx, c) in f.coeffs().iter().enumerate() {
        if *c == Default::default() {
            continue;
        }
        let (a, b, d) = g.unravel(idx);
        let k = [signed_index(a, g.n_h()), signed_index(b, g.n_h()), signed_index(d, g.n_v())];
        for (o, k) in out.iter_mut().zip(k) {
            *o = (*o).max(k.abs());
        }
    }
    out
}

/// The product is formed on the sample grid when it is alias free there
/// and on the grid refined twice otherwise.
pub fn check_product_laws(index: i32, s: f64, pairs: &[(Sample, Sample)]) -> Result<ProductLawReports> {
    if !s.is_finite() {
        return Err(Error::InvalidArgument(format!("regularity must be finite, got {s}")));
    }
    let mut out = ProductLawReports {
        algebra: RatioReport::new(format!("product_algebra(s={s})")),
        half: RatioReport::new(format!("product_half(s={s})")),
        mixed: RatioReport::new(format!("product_mixed(s={s})")),
    };
    let b = |t: &BlockTable, h: f64| t.besov(&BesovSpec::anisotropic(h, s));
    for (a, c) in pairs {
        a.field.ensure_same_grid(&c.field)?;
        let g = a.field.grid();
        let (ea, ec) = (extent(&a.field), extent(&c.field));
        let limits = [g.n_h(), g.n_h(), g.n_v()];
        let fits = (0..3).all(|i| 2 * (ea[i] + ec[i]) < limits[i] as i64);
        let factor = if fits { 1 } else { 2 };
        let (fa, fc) = (a.field.zero_padded(factor), c.field.zero_padded(factor));
        let prod = BlockTable::of_field(&raw_product(&fa, &fc)?);
        let (ta, tc) = (BlockTable::of_field(&fa), BlockTable::of_field(&fc));
        let dims = a.field.grid().dims();
        let seed = a.seed.or(c.seed);
        if s >= 0.5 {
            out.algebra.push(index, dims, seed, b(&prod, 1.0), b(&ta, 1.0) * b(&tc, 1.0))?;
        }
        out.half.push(index, dims, seed, b(&prod, 0.0), b(&ta, 0.5) * b(&tc, 0.5))?;
        out.mixed.push(index, dims, seed, b(&prod, 0.0), b(&ta, 1.0) * b(&tc, 0.0))?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    #[test]
    fn column_norms_of_a_separable_field() {
        // cos x₁ · sin 4x₃ lies in the single block q = 1 with weight one;
        // its largest column has L²_v norm √π.
        let g = Grid::new(8, 16, 0).unwrap();
        let f = SpectralField::from_fn(g, |x, _, z| x.cos() * (4.0 * z).sin());
        let cols = linf_h_l2_v_blocks(&f);
        let slot = BlockTable::zeros(g).slot_of_q(1).unwrap();
        for (i, c) in cols.iter().enumerate() {
            let expect = if i == slot { std::f64::consts::PI.sqrt() } else { 0.0 };
            assert!((c - expect).abs() < 1e-12, "slot {i}: {c}");
        }
    }
}
