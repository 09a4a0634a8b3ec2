//! Scenario runner for the `dirac-fluid` library: JSON configs, orchestration
//! of the solvers and fluid diagnostics, CSV output and an invariant checker.

pub mod check;
pub mod config;
pub mod error;
pub mod runner;

pub use config::{build_initial, parse_config, Scenario};
pub use error::CliError;
pub use runner::{run, RunSummary};
