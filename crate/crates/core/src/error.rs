use thiserror::Error;

/// Errors raised by the engine. The CLI maps each variant onto an exit code.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid parameters: out-of-range indices, mismatched ambients, bad primes.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// The requested computation exceeds a configured size cap.
    #[error("resource cap exceeded: {0}")]
    Resource(String),

    /// An internal consistency check failed. This always signals a bug.
    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("quotient not finite-dimensional")]
    NotFiniteDimensional,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("cache I/O error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn argument<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}
