//! Experiment orchestration: initial data, the ε-sweep, the time partition
//! and report files.

pub mod export;
pub mod initial;
pub mod partition;
pub mod pressure;
pub mod sweep;

pub use export::{config_hash, export_report};
pub use initial::{build_initial_data, InitialData, InitialDataSpec, Mode, StreamProfile, VerticalProfile};
pub use partition::{chunk_product, time_partition, Partition};
pub use pressure::{verify_pressure_bounds, PressureReport};
pub use sweep::{
    compute_uapp_norms, fit_log_log, run_paired, run_remainder_experiment, run_remainder_single,
    ExperimentReport, GridSpec, RemainderSnapshot, SlopeFit, SweepConfig, SweepRow, UappNorms,
    UappSeries,
};
