//! Fixtures shared by the benchmarks.

use anivisc_core::{Grid, SpectralField, VelocityState};

/// A smooth divergence-free field with energy in every direction, `n³` points.
pub fn sample_state(n: usize) -> VelocityState {
    let g = Grid::new(n, n, 1).expect("valid grid");
    let u = [
        SpectralField::from_fn(g, |x, y, z| x.sin() * y.cos() * z.cos()),
        SpectralField::from_fn(g, |x, y, z| -x.cos() * y.sin() * z.cos()),
        SpectralField::from_fn(g, |x, y, _| (x + y).cos()),
    ];
    VelocityState::new(u, 0.0).expect("same grid")
}
