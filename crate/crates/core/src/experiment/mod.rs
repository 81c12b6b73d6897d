//! Monte Carlo sweeps, result tables and the command-line interface.

pub mod cli;
pub mod csv;
pub mod sweep;
pub mod validate;

pub use cli::cli_main;
pub use sweep::{run_sweep, SweepParameter, SweepResult, SweepRow, SweepSpec, TrialRecord};
