use thiserror::Error;

/// Errors raised by the library. Variants map one-to-one onto the FFI status codes.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero in Q(beta)")]
    DivisionByZero,
    #[error("not supported: {0}")]
    NotSupported(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("word length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("point lies outside the interval [0, 1/(beta-1)]")]
    OutOfDomain,
    #[error("frequency outside subshift spectrum: {0}")]
    Infeasible(String),
    #[error("closed forms not available for order {0}")]
    ClosedFormUnavailable(usize),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
