use std::path::PathBuf;

use ccqmac_core::Error as CoreError;

/// Failures surfaced to the command line, each with a fixed exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("resource budget: {0}")]
    Budget(CoreError),
    #[error("{0}")]
    Input(CoreError),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Usage(_) | CliError::Io { .. } | CliError::Input(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Invariant(_) => 4,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        CliError::Parse {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::BudgetExceeded { .. } => CliError::Budget(e),
            CoreError::NonHermitian { .. } | CoreError::NegativeOperator { .. } | CoreError::InvalidPovm { .. } => {
                CliError::Invariant(e.to_string())
            }
            other => CliError::Input(other),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
