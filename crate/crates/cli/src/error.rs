use std::path::PathBuf;

use thiserror::Error;

use crate::config::ConfigError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error("{0}")]
    Usage(String),

    #[error("simulation failed: {0}")]
    Simulation(#[from] v2x_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed report {path}: {reason}")]
    Report { path: PathBuf, reason: String },

    #[error("incomplete sweep, missing cells: {}", .0.join(", "))]
    IncompleteSweep(Vec<String>),

    #[error("duplicate sweep cell {0}")]
    DuplicateCell(String),
}

impl CliError {
    /// 1 for configuration / usage problems, 2 for anything that failed at run time.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => 1,
            _ => 2,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}
