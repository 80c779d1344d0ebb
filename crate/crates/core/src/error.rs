use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("predicate needs at least 2 entries, got {0}")]
    TooShort(usize),
    #[error("entry {index} is {value}, expected -1 or +1")]
    NotASign { index: usize, value: i64 },
    #[error("cannot parse predicate: {0}")]
    Parse(String),
    #[error("window [{start}, {start}+{length}) does not fit a predicate with n = {n}")]
    WindowOutOfRange { start: usize, length: usize, n: usize },
    #[error("n = {0} must be a power of two and at least 64")]
    NotEmbeddable(usize),
    #[error("{what}: n = {n} exceeds the limit {max}")]
    Gate { what: &'static str, n: usize, max: usize },
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("zero vector in factorization")]
    ZeroVector,
    #[error("function is not ±1-valued")]
    NotSignValued,
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
