//! Grids, transforms and Fourier multipliers.

pub mod checkpoint;
pub(crate) mod fft;
pub mod field;
pub mod grid;
pub mod ops;
pub mod slice;

pub use checkpoint::{read_checkpoint, write_checkpoint};
pub use field::{sample_fn, vector_l2_norm, vector_sub, SpectralField, VelocityState};
pub use slice::{slice_leray_project, SliceField};
pub use grid::{signed_index, storage_index, Axis, Grid};
pub use ops::{
    advect, dealias, derivative, divergence, horizontal_gradient, horizontal_laplacian,
    inverse_horizontal_laplacian, leray_project, leray_project_state, product, raw_product,
    relative_divergence, slowly_varying_embed, stretch_exponent,
};

/// In-place unnormalized inverse transform over all three axes.
pub(crate) fn fft_inverse_all(data: &mut [crate::Complex64], grid: Grid) {
    fft::inverse(data, grid.dims(), &fft::ALL_AXES);
}

/// In-place unnormalized inverse transform over the two horizontal axes.
pub(crate) fn fft_inverse_horizontal(data: &mut [crate::Complex64], grid: Grid) {
    fft::inverse(data, grid.dims(), &fft::HORIZONTAL_AXES);
}
