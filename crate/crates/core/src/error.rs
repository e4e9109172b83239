use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("kind mismatch: {0}")]
    KindMismatch(String),
    #[error("time regression: clock is {clock}, requested {requested}")]
    TimeRegression { clock: f64, requested: f64 },
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("incompatible endpoints: {0}")]
    Incompatible(String),
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
