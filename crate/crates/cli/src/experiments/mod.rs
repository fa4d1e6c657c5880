//! The experiment engine: phase-diagram grids over the `(a, b)` plane and
//! risk-versus-SNR curves, with paired method comparisons, deterministic
//! seeding, worker-pool parallelism and checkpoint/resume.

pub mod checkpoint;
mod engine;
mod spec;

pub use engine::{resume_grid, resume_grid_with, run_curve, run_grid, run_grid_with, RunOptions};
pub use spec::{
    diff_grids, linspace, success_transform, CellResult, CurveResult, CurveRow, CurveSpec,
    DiffGrid, GridResult, GridSpec, Method, MethodCurve, MethodTally,
};
