//! Command-line front end: scenario files, frequency sweeps, optimum reports
//! and cross-checks.

pub mod config;
pub mod emit;
pub mod error;
pub mod report;
pub mod sweep;
pub mod verify;

pub use config::{load_config, ScenarioConfig};
pub use error::{CliError, Result};
