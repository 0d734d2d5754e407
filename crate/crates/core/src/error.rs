use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("degenerate comparison: {0}")]
    DegenerateComparison(String),
    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),
    #[error("n = {n} exceeds the enumeration cap of {cap}")]
    Capacity { n: usize, cap: usize },
    #[error("status vector has zero probability")]
    ImpossibleStatus,
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
