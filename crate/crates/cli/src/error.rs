use std::path::Path;

use thiserror::Error;

/// Failures of a CLI run, split by exit status.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments, malformed input or a violated precondition.
    #[error("{0}")]
    Invalid(String),
    /// A file or directory could not be read or written.
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Io(_) => 2,
        }
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        CliError::Invalid(msg.into())
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Io(format!("{}: {err}", path.display()))
    }

    /// Attaches the offending path to a library error.
    pub fn at(path: &Path, err: qgsynth::Error) -> Self {
        match err {
            qgsynth::Error::Io(e) => CliError::io(path, e),
            other => CliError::Invalid(format!("{}: {other}", path.display())),
        }
    }
}

impl From<qgsynth::Error> for CliError {
    fn from(err: qgsynth::Error) -> Self {
        match err {
            qgsynth::Error::Io(e) => CliError::Io(e.to_string()),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
