use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A value violated an operation's precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Two objects that must share a shape (alphabet, arity, length) do not.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A dense table would exceed the configured maximum length.
    #[error("dense representation needs {needed} entries, cap is {cap}")]
    CapExceeded { needed: u128, cap: usize },

    /// Malformed input data (files, tables, symbol lists).
    #[error("parse error: {0}")]
    Parse(String),

    /// An iterative or direct solver failed to reach its residual target.
    #[error("solver did not converge: residual {residual:e} after {iterations} iterations")]
    NonConvergence { residual: f64, iterations: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
