//! JSON-configured experiment harness: sweeps, single solves and the
//! invariant self-check behind the `validate` subcommand.

mod config;
mod runner;
mod validate;

pub use config::{EpsilonSpec, ExperimentConfig, Geometry, KTrunc};
pub use runner::{
    build_points, offnode_targets, run_experiment, solve_once, write_results_csv, DumpFlags,
    ExperimentOutput, RunRow, SolveOutput, CSV_HEADER,
};
pub use validate::{
    check_laplacian_fd, check_source_fd, run_validation, CheckResult, ValidationLevel,
    ValidationReport,
};
