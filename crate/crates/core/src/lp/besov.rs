//! Block energy tables and the Besov norms built from them.

use serde::{Deserialize, Serialize};

use super::blocks::{block_range, horizontal_magnitudes, vertical_magnitudes, BlockRange, Direction};
use super::cutoff::block_weight;
use crate::spectral::{Axis, Grid, SpectralField};

/// Which Besov norm to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BesovKind {
    /// `𝓑^{s,s′}`: double sum over horizontal `j` and vertical `q`.
    Anisotropic,
    /// `B^{0,s′}`: vertical blocks only (`s` is ignored).
    Vertical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesovSpec {
    pub s: f64,
    pub s_prime: f64,
    pub kind: BesovKind,
}

impl BesovSpec {
    pub fn anisotropic(s: f64, s_prime: f64) -> Self {
        Self {
            s,
            s_prime,
            kind: BesovKind::Anisotropic,
        }
    }

    pub fn vertical(s_prime: f64) -> Self {
        Self {
            s: 0.0,
            s_prime,
            kind: BesovKind::Vertical,
        }
    }

    /// Short label such as `B^{0,0.5}` or `𝓑^{1,0.5}`.
    pub fn label(&self) -> String {
        match self.kind {
            BesovKind::Vertical => format!("B^{{0,{}}}", self.s_prime),
            BesovKind::Anisotropic => format!("Bani^{{{},{}}}", self.s, self.s_prime),
        }
    }
}

/// Per-mode multiplier applied before measuring blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeWeight {
    Identity,
    /// `∇ʰ`: squared weight `|ξ_h|²`.
    HorizontalGradient,
    /// `∂₃`: squared weight `ξ₃²`.
    VerticalDerivative,
}

/// Squared L² norms of every vertical block and every (horizontal,
/// vertical) block pair of a scalar or vector field. Slot 0 on each axis
/// holds the zero-frequency part; slot `1 + (q − min)` holds block `q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockTable {
    pub grid: Grid,
    pub q_min: i32,
    pub q_max: i32,
    pub j_min: i32,
    pub j_max: i32,
    /// `‖Δ_qᵛ f‖²`, length `1 + n_q`.
    pub vertical: Vec<f64>,
    /// `‖Δ_jʰ Δ_qᵛ f‖²`, row-major in `j`, length `(1 + n_j)(1 + n_q)`.
    pub anisotropic: Vec<f64>,
}

/// Precomputed `(slot, weight)` lists per frequency index.
struct SlotWeights {
    range: BlockRange,
    per_index: Vec<Vec<(usize, f64)>>,
}

impl SlotWeights {
    fn new(mags: &[f64], range: BlockRange) -> Self {
        let per_index = mags
            .iter()
            .map(|&r| {
                if r == 0.0 {
                    return vec![(0, 1.0)];
                }
                range
                    .iter()
                    .filter_map(|q| {
                        let w = block_weight(q, r);
                        (w != 0.0).then(|| (1 + (q - range.min) as usize, w))
                    })
                    .collect()
            })
            .collect();
        Self { range, per_index }
    }

    fn slots(&self) -> usize {
        1 + self.range.len()
    }
}

impl BlockTable {
    pub fn zeros(grid: Grid) -> Self {
        let qr = block_range(grid, Direction::Vertical);
        let jr = block_range(grid, Direction::Horizontal);
        Self {
            grid,
            q_min: qr.min,
            q_max: qr.max,
            j_min: jr.min,
            j_max: jr.max,
            vertical: vec![0.0; 1 + qr.len()],
            anisotropic: vec![0.0; (1 + jr.len()) * (1 + qr.len())],
        }
    }

    /// Table of a scalar field.
    pub fn of_field(f: &SpectralField) -> Self {
        Self::of_fields(&[f], ModeWeight::Identity)
    }

    /// Table of a vector field: squared block norms are summed over
    /// components.
    pub fn of_vector(v: &[SpectralField], weight: ModeWeight) -> Self {
        let refs: Vec<&SpectralField> = v.iter().collect();
        Self::of_fields(&refs, weight)
    }

    pub fn of_fields(fields: &[&SpectralField], weight: ModeWeight) -> Self {
        assert!(!fields.is_empty(), "block table of nothing");
        let g = fields[0].grid();
        assert!(fields.iter().all(|f| f.grid() == g), "block table across grids");
        let mut table = Self::zeros(g);
        let vw = SlotWeights::new(&vertical_magnitudes(g), table.q_range());
        let hw = SlotWeights::new(&horizontal_magnitudes(g), table.j_range());
        let nq = vw.slots();
        let k1 = g.deriv_wavenumbers(Axis::X1);
        let k2 = g.deriv_wavenumbers(Axis::X2);
        let k3 = g.deriv_wavenumbers(Axis::X3);
        let (n_h, n_v) = (g.n_h(), g.n_v());
        let vol = g.volume();
        for a in 0..n_h {
            for b in 0..n_h {
                let hslots = &hw.per_index[a * n_h + b];
                let kh2 = k1[a] * k1[a] + k2[b] * k2[b];
                for c in 0..n_v {
                    let idx = g.index(a, b, c);
                    let mut e: f64 = fields.iter().map(|f| f.coeffs()[idx].norm_sqr()).sum();
                    if e == 0.0 {
                        continue;
                    }
                    e *= vol
                        * match weight {
                            ModeWeight::Identity => 1.0,
                            ModeWeight::HorizontalGradient => kh2,
                            ModeWeight::VerticalDerivative => k3[c] * k3[c],
                        };
                    for &(vs, vwt) in &vw.per_index[c] {
                        let ev = vwt * vwt * e;
                        table.vertical[vs] += ev;
                        for &(hs, hwt) in hslots {
                            table.anisotropic[hs * nq + vs] += hwt * hwt * ev;
                        }
                    }
                }
            }
        }
        table
    }

    pub fn q_range(&self) -> BlockRange {
        BlockRange {
            min: self.q_min,
            max: self.q_max,
        }
    }

    pub fn j_range(&self) -> BlockRange {
        BlockRange {
            min: self.j_min,
            max: self.j_max,
        }
    }

    pub fn n_q_slots(&self) -> usize {
        self.vertical.len()
    }

    pub fn n_j_slots(&self) -> usize {
        self.anisotropic.len() / self.vertical.len()
    }

    /// Weight of vertical slot `slot` for regularity `s′`. The mean slot
    /// gets the fundamental vertical frequency raised to `s′`, which is 1 on
    /// the unit box and keeps the norms invariant under the vertical
    /// stretch.
    pub fn vertical_weight(&self, slot: usize, s_prime: f64) -> f64 {
        if slot == 0 {
            self.grid.fundamental(Axis::X3).powf(s_prime)
        } else {
            ((self.q_min + slot as i32 - 1) as f64 * s_prime).exp2()
        }
    }

    pub fn horizontal_weight(&self, slot: usize, s: f64) -> f64 {
        if slot == 0 {
            self.grid.fundamental(Axis::X1).powf(s)
        } else {
            ((self.j_min + slot as i32 - 1) as f64 * s).exp2()
        }
    }

    /// Dyadic index of a vertical slot (`None` for the mean).
    pub fn q_of_slot(&self, slot: usize) -> Option<i32> {
        (slot > 0).then(|| self.q_min + slot as i32 - 1)
    }

    pub fn j_of_slot(&self, slot: usize) -> Option<i32> {
        (slot > 0).then(|| self.j_min + slot as i32 - 1)
    }

    pub fn slot_of_q(&self, q: i32) -> Option<usize> {
        self.q_range().contains(q).then(|| 1 + (q - self.q_min) as usize)
    }

    /// `‖Δ_qᵛ f‖_{L²}`; zero outside the grid range.
    pub fn vertical_block_norm(&self, q: i32) -> f64 {
        self.slot_of_q(q).map_or(0.0, |s| self.vertical[s].sqrt())
    }

    pub fn mean_norm(&self) -> f64 {
        self.vertical[0].sqrt()
    }

    /// Every block norm paired with its Besov weight, in summation order
    /// (ascending `q`, then `j`).
    pub fn weighted_blocks(&self, spec: &BesovSpec) -> Vec<(f64, usize)> {
        match spec.kind {
            BesovKind::Vertical => (0..self.n_q_slots())
                .map(|vs| (self.vertical_weight(vs, spec.s_prime), vs))
                .collect(),
            BesovKind::Anisotropic => {
                let nq = self.n_q_slots();
                let mut out = Vec::with_capacity(self.anisotropic.len());
                for vs in 0..nq {
                    let wv = self.vertical_weight(vs, spec.s_prime);
                    for hs in 0..self.n_j_slots() {
                        out.push((wv * self.horizontal_weight(hs, spec.s), hs * nq + vs));
                    }
                }
                out
            }
        }
    }

    /// Squared norms of the blocks addressed by [`BlockTable::weighted_blocks`].
    pub fn energies(&self, kind: BesovKind) -> &[f64] {
        match kind {
            BesovKind::Vertical => &self.vertical,
            BesovKind::Anisotropic => &self.anisotropic,
        }
    }

    pub fn besov(&self, spec: &BesovSpec) -> f64 {
        let e = self.energies(spec.kind);
        self.weighted_blocks(spec)
            .iter()
            .map(|&(w, i)| w * e[i].sqrt())
            .sum()
    }
}

/// `‖f‖` in the requested Besov space.
pub fn besov_norm(f: &SpectralField, spec: &BesovSpec) -> f64 {
    BlockTable::of_field(f).besov(spec)
}

/// Besov norm of a vector field (block norms combine componentwise in ℓ²).
pub fn besov_norm_vector(v: &[SpectralField], spec: &BesovSpec) -> f64 {
    BlockTable::of_vector(v, ModeWeight::Identity).besov(spec)
}

/// Isotropic homogeneous `B^s_{2,r}` norm over 3D blocks in `|ξ|`
/// (`r = ∞` allowed). The zero mode is ignored.
pub fn isotropic_besov_norm(f: &SpectralField, s: f64, r: f64) -> f64 {
    let g = f.grid();
    let k1 = g.wavenumbers(Axis::X1);
    let k2 = g.wavenumbers(Axis::X2);
    let k3 = g.wavenumbers(Axis::X3);
    let mags: Vec<f64> = {
        let mut m = Vec::with_capacity(g.n_points());
        for a in &k1 {
            for b in &k2 {
                for c in &k3 {
                    m.push((a * a + b * b + c * c).sqrt());
                }
            }
        }
        m
    };
    let lo = g.fundamental(Axis::X3).min(1.0);
    let hi = mags.iter().copied().fold(0.0, f64::max);
    let (start, end) = (lo.log2().floor() as i32 - 2, hi.log2().ceil() as i32);
    let vol = g.volume();
    let mut energy = vec![0.0; (end - start + 1) as usize];
    for (idx, c) in f.coeffs().iter().enumerate() {
        let rr = mags[idx];
        if rr == 0.0 {
            continue;
        }
        for (slot, q) in (start..=end).enumerate() {
            let w = block_weight(q, rr);
            if w != 0.0 {
                energy[slot] += w * w * vol * c.norm_sqr();
            }
        }
    }
    let terms = (start..=end)
        .zip(&energy)
        .map(|(q, e)| (q as f64 * s).exp2() * e.sqrt());
    if r.is_infinite() {
        terms.fold(0.0, f64::max)
    } else {
        terms.map(|t| t.powf(r)).sum::<f64>().powf(1.0 / r)
    }
}
