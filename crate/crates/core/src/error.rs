use thiserror::Error;

/// Errors raised by the solvers and the function algebra.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("{value} lies outside the domain [{lo}, {hi}]")]
    OutOfDomain { value: String, lo: String, hi: String },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("{what} needs {needed}, budget is {budget}")]
    BudgetExceeded {
        what: &'static str,
        needed: String,
        budget: String,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }
}

macro_rules! ensure {
    ($cond:expr, $($arg:tt)+) => {
        if !$cond {
            return Err($crate::error::Error::Invalid(format!($($arg)+)));
        }
    };
}

pub(crate) use ensure;
