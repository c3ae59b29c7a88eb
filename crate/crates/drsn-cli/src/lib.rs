//! Command-line runs of the `drsn` library with JSON reports and CSV
//! trajectories.

pub mod cli;
pub mod config;
pub mod error;
pub mod report;
pub mod run;

pub use error::{CliError, Result};
