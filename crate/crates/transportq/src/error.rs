use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("encoding error: {0}")]
    Encoding(String),

    #[error("bitstring length {got} does not match variable count {expected}")]
    BitLength { expected: usize, got: usize },

    #[error("invalid bitstring: {0}")]
    InvalidBits(String),

    #[error("qubit count {0} outside supported range {1}..={2}")]
    QubitRange(usize, usize, usize),

    #[error("circuit error: {0}")]
    Circuit(String),

    #[error("parameter count mismatch: circuit has {expected} free parameters, got {got}")]
    ParamCount { expected: usize, got: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
