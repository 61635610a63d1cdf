use std::io;
use std::path::Path;

use scem_core::ScemError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("malformed tensor file: {0}")]
    Format(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Shape(String),
    #[error(transparent)]
    Core(#[from] ScemError),
}

impl CliError {
    pub fn io(path: &Path, err: io::Error) -> Self {
        CliError::Io(format!("{}: {err}", path.display()))
    }

    /// Process exit status: 2 for I/O, 3 for solver non-convergence, 4 for
    /// shape or validation failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) | CliError::Format(_) => 2,
            CliError::Core(ScemError::NonConvergence { .. }) => 3,
            CliError::Config(_) | CliError::Shape(_) | CliError::Core(_) => 4,
        }
    }
}
