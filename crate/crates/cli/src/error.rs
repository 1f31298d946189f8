use std::path::PathBuf;

use thiserror::Error;

/// CLI failures, each mapped to a stable process exit code:
/// 2 = flag or scene parse error, 3 = I/O failure, 4 = config invariant
/// violation.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Config(String),
}

impl CliError {
    pub fn parse(msg: impl Into<String>) -> CliError {
        CliError::Parse(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> CliError {
        CliError::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> CliError {
        CliError::Io { path: path.into(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Config(_) => 4,
        }
    }
}

impl From<camerapaint::RenderError> for CliError {
    fn from(e: camerapaint::RenderError) -> CliError {
        CliError::Config(e.to_string())
    }
}
