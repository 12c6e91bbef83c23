use std::path::PathBuf;

use stpconv::StpError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{}: {msg}", path.display())]
    Parse { path: PathBuf, msg: String },

    #[error("{0}")]
    Shape(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{failed} of {total} reference cases outside tolerance")]
    ReferenceMismatch { failed: usize, total: usize },
}

impl CliError {
    /// 1 for parse errors, 2 for shape or stride mismatches, 3 for I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Parse { .. } => 1,
            CliError::Shape(_) => 2,
            CliError::Io { .. } => 3,
            CliError::ReferenceMismatch { .. } => 4,
        }
    }
}

impl From<StpError> for CliError {
    fn from(e: StpError) -> Self {
        CliError::Shape(e.to_string())
    }
}
