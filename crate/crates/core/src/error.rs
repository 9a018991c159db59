use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("non-finite value {value} at abscissa {x}")]
    NonFinite { x: f64, value: String },

    #[error("cache under-resolved: have {have} grid points, need at least {need}")]
    UnderResolved { have: usize, need: usize },

    #[error("wrong sample count: expected {expected}, got {got}")]
    SampleCount { expected: usize, got: usize },

    #[error("degree {degree} exceeds the admissible bound {bound}")]
    DegreeTooLarge { degree: usize, bound: usize },

    #[error("bisection failed to bracket the root: {0}")]
    NoBracket(String),

    #[error("operation not supported: {0}")]
    Unsupported(String),

    #[error("linear program did not converge within {0} pivots")]
    Unconverged(usize),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
