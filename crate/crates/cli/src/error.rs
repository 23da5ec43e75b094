use std::path::Path;

use thiserror::Error;

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments, spec files or input rows. Exit code 2.
    #[error("{0}")]
    Validation(String),

    /// Exit code 3.
    #[error("{0}")]
    Io(String),

    /// Eigensolver non-convergence and similar. Exit code 4.
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Io(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }

    pub(crate) fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Io(format!("{}: {err}", path.display()))
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }
}

impl From<bispec_core::Error> for CliError {
    fn from(err: bispec_core::Error) -> Self {
        match err {
            bispec_core::Error::Eigensolver(_) => CliError::Numerical(err.to_string()),
            _ => CliError::Validation(err.to_string()),
        }
    }
}

/// Prefixes a core error with the file it came from, keeping its class.
pub(crate) fn in_file(path: &Path, err: bispec_core::Error) -> CliError {
    match CliError::from(err) {
        CliError::Validation(m) => CliError::Validation(format!("{}: {m}", path.display())),
        CliError::Numerical(m) => CliError::Numerical(format!("{}: {m}", path.display())),
        other => other,
    }
}
