use bilevel_knapsack::Error as CoreError;
use thiserror::Error;

/// Failures of a CLI invocation, grouped by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed or invalid input: exit code 2.
    #[error("{0}")]
    Input(String),
    /// Model outside what the solvers handle, or over budget: exit code 3.
    #[error("{0}")]
    Capability(String),
    /// A solver contradicted itself or its oracle: exit code 4.
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Capability(_) => 3,
            CliError::Internal(_) => 4,
        }
    }

    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let msg = e.to_string();
        match e {
            CoreError::DivisionByZero | CoreError::OutOfDomain { .. } | CoreError::Invalid(_) => CliError::Input(msg),
            CoreError::BudgetExceeded { .. } | CoreError::Unsupported(_) => CliError::Capability(msg),
            CoreError::Invariant(_) => CliError::Internal(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(format!("i/o error: {e}"))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
