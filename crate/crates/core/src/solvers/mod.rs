//! Time integration for the full system and for the slice model.

pub mod approx;
pub mod nsh;
pub mod slices;
pub mod stepping;
pub mod transport;

pub use nsh::{horizontal_dissipation, step_nsh, NshSolver};
pub use stepping::{cfl_limit, Scheme, StepperConfig, Trajectory};
pub use slices::{ns2d_time_derivative, solve_ns2d_slices, SliceEnsemble, SliceRun};
pub use transport::{solve_transport_w3, ApproxSnapshot, ApproxSolver};
pub use approx::{
    assemble_uapp, assemble_uapp_trajectory, compute_forcing_f, compute_p0, compute_p1,
    compute_pressures, reconstruct_wh, uapp_forcing, w3_time_derivative, wh_momentum_defect,
    PressureFields,
};
