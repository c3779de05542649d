use std::io;
use std::path::PathBuf;

use stark_core::{SiegertError, StateError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    State(#[from] StateError),
    #[error("{path}: {source}")]
    File { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Solver(#[from] SiegertError),
    #[error("{failed} of {total} points did not converge")]
    Unconverged { failed: usize, total: usize, strict: bool },
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    /// 2 for bad input, 3 for solver failures under `--strict`.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::State(_) => 2,
            CliError::Unconverged { strict: true, .. } => 3,
            _ => 1,
        }
    }
}
