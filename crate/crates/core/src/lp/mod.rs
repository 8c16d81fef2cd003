//! Littlewood-Paley analysis: dyadic blocks, Besov and Chemin-Lerner
//! norms, paraproducts and the heat-flow characterization.

pub mod besov;
pub mod blocks;
pub mod bony;
pub mod chemin_lerner;
pub mod cutoff;
pub mod heat;
pub mod report;

pub use besov::{besov_norm, besov_norm_vector, isotropic_besov_norm, BesovKind, BesovSpec, BlockTable, ModeWeight};
pub use blocks::{
    block_range, horizontal_block, horizontal_lowpass, mean_part, vertical_block, vertical_lowpass,
    BlockRange, Direction, DyadicDecomposition,
};
pub use bony::{bony_vertical_decompose, BonyParts};
pub use chemin_lerner::{chemin_lerner_norm, chemin_lerner_window, l1_time_norm, NormTimeSeries, TimeExponent};
pub use cutoff::{block_weight, chi, lowpass_weight, CutoffProfile};
pub use heat::{heat_flow_norm, heat_lp_profile, HeatFlowSampling};
