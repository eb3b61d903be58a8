use thiserror::Error;

/// Errors raised by the estimators, models and experiment drivers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,

    #[error("insufficient sample: need n >= {needed}, got n = {got}")]
    InsufficientSample { needed: u64, got: u64 },

    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),

    #[error("invalid frequency data: {0}")]
    InvalidData(String),

    #[error("invalid pmf: {0}")]
    InvalidPmf(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid model string `{0}`")]
    UnknownModel(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("numeric failure: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;
