//! Experiment runner around [`conewave_core`]: JSON configs, parallel point
//! evaluation, certification checks and CSV / JSON reports.
//!
//! The `conewave` binary exposes the subcommands of [`commands::Command`].

pub mod catalog;
pub mod checks;
pub mod commands;
pub mod config;
pub mod error;
pub mod parallel;
pub mod report;

pub use commands::{run, Command};
pub use config::{ExperimentConfig, Scenario};
pub use error::{exit, CliError, CliResult};
