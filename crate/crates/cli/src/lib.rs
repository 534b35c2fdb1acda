//! Batch front end over the core library: JSON-configured scenario runs,
//! parameter sweeps, plot-data emission, and a built-in verification suite.
//!
//! Everything here is deterministic by construction: reports carry no
//! wall-clock values, floats are printed with a fixed 17-significant-digit
//! scientific format, and sweep rows merge in input order no matter how many
//! worker threads ran them.  Timing lines go to the console, never into
//! data files.

pub mod config;
pub mod report;
pub mod scenario;
pub mod sweep;
pub mod verify;

use std::path::PathBuf;

/// Failures split by exit-code class: 1 validation, 2 numeric, 3 I/O.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{code}: {message}")]
    Numeric { code: &'static str, message: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Numeric { .. } => 2,
            CliError::Io { .. } => 3,
        }
    }

    pub fn numeric(err: curvphase_core::Error) -> Self {
        CliError::Numeric { code: err.code(), message: err.to_string() }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// On-disk format of the scenario report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ReportFormat {
    Json,
    Csv,
}
