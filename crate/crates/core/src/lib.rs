//! Pseudo-spectral tools for Navier-Stokes with horizontal-only viscosity:
//! transforms and multipliers, anisotropic Littlewood-Paley analysis,
//! slice solvers, inequality checks and the remainder experiment.

pub mod error;
pub mod estimates;
pub mod harness;
pub mod lp;
pub mod solvers;
pub mod spectral;

pub use error::{Error, Result};
pub use rustfft::num_complex::Complex64;
pub use spectral::{Axis, Grid, SpectralField, VelocityState};
