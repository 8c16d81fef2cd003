use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the spectral, analysis and solver layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("dimension mismatch: expected {expected} samples, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("stretch factor {0} is not a power of two in (0, 1]")]
    NonDyadicStretch(f64),

    #[error("field has horizontal-mean content {content:.3e} (relative), operator needs it to vanish")]
    HorizontalMean { content: f64 },

    #[error("initial data has nonzero mean velocity {0:.3e}")]
    NonzeroMean(f64),

    #[error("field is not divergence free (relative divergence {0:.3e})")]
    NotDivergenceFree(f64),

    #[error("profile is not resolved: spectral tail {tail:.3e} exceeds {limit:.1e}")]
    Unresolved { tail: f64, limit: f64 },

    #[error("CFL violation at t = {time}: dt = {dt:.3e} exceeds bound, advised dt = {advised:.3e}")]
    Cfl { time: f64, dt: f64, advised: f64 },

    #[error("blow-up guard tripped at t = {time}: norm {norm:.3e} exceeds {limit:.3e}")]
    BlowUp { time: f64, norm: f64, limit: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("trajectories are not time aligned: {0}")]
    Misaligned(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("bad checkpoint {path}: {reason}")]
    Checkpoint { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
