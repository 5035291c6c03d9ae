use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("unknown sequence id `{0}`")]
    UnknownId(String),
    #[error("invalid family spec `{0}`")]
    InvalidFamily(String),
    #[error("recurrence for `{id}` is not integral at step n = {n}")]
    NonIntegralStep { id: String, n: u64 },
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("variable lists differ: {left:?} vs {right:?}")]
    VariableMismatch {
        left: Vec<String>,
        right: Vec<String>,
    },
    #[error("unknown kernel `{0}`")]
    UnknownKernel(String),
}

pub type Result<T> = std::result::Result<T, Error>;
