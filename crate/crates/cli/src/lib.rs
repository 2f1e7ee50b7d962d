//! File formats, command implementations and timing for the `hhfactor`
//! binary. Every command returns a serializable report plus an exit code so
//! the binary itself only parses arguments and prints.

pub mod commands;
pub mod format;
pub mod timing;

use std::path::Path;

pub use commands::{Outcome, Report};
pub use format::ErrorTraceRow;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: u8 = 0;
    pub const INVALID_INPUT: u8 = 1;
    pub const CAP_REACHED: u8 = 2;
    pub const AMBIGUOUS: u8 = 3;
    pub const NO_SOLUTION: u8 = 4;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Stream(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{path}: {inner}")]
    InFile { path: String, inner: Box<CliError> },
    #[error(transparent)]
    Core(#[from] hhfactor::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub(crate) fn parse(line: usize, message: String) -> Self {
        CliError::Parse { line, message }
    }

    pub(crate) fn in_file(self, path: &Path) -> Self {
        match self {
            e @ (CliError::Io { .. } | CliError::InFile { .. }) => e,
            e => CliError::InFile {
                path: path.display().to_string(),
                inner: Box::new(e),
            },
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(
                hhfactor::Error::Ambiguous { .. } | hhfactor::Error::Underdetermined,
            ) => exit::AMBIGUOUS,
            CliError::Core(hhfactor::Error::NoSolution) => exit::NO_SOLUTION,
            CliError::InFile { inner, .. } => inner.exit_code(),
            _ => exit::INVALID_INPUT,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
