use std::path::PathBuf;

use thiserror::Error;

/// Exit status for a run whose report records a failed check.
pub const EXIT_CHECK_FAILED: u8 = 1;
/// Exit status for unreadable or invalid input and configuration.
pub const EXIT_INPUT: u8 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Input { path: PathBuf, source: drsn::Error },

    #[error("configuration {path}: {message}")]
    ConfigFile { path: PathBuf, message: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Library(#[from] drsn::Error),

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Read { .. }
            | CliError::Write { .. }
            | CliError::Input { .. }
            | CliError::ConfigFile { .. }
            | CliError::Config(_)
            | CliError::Csv(_) => EXIT_INPUT,
            CliError::Library(e) => match e {
                drsn::Error::Parse(_)
                | drsn::Error::Shape(_)
                | drsn::Error::Config(_)
                | drsn::Error::NotASaddleNode(_)
                | drsn::Error::Geometry(_) => EXIT_INPUT,
                _ => EXIT_CHECK_FAILED,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
