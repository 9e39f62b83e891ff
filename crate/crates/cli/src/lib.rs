//! Std companion of `besov-core`: configuration, file formats, the
//! acceptance criteria and the `besov` command line.

pub mod commands;
pub mod config;
pub mod criteria;
pub mod io;
pub mod parallel;
pub mod tolerances;

use std::fmt;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Failure classes, one per exit code.
#[derive(Debug)]
pub enum CliError {
    Io(String),
    Usage(String),
    /// At least one criterion of a scenario failed.
    Criterion(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Criterion(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Criterion(m) => write!(f, "criterion failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<besov_core::Error> for CliError {
    fn from(e: besov_core::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        if e.is_io_error() {
            CliError::Io(e.to_string())
        } else {
            CliError::Usage(format!("malformed csv: {e}"))
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        if e.is_io() {
            CliError::Io(e.to_string())
        } else {
            CliError::Usage(format!("malformed json: {e}"))
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
