use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or argument is outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// A computation produced a non-finite or inconsistent value.
    #[error("numeric error: {0}")]
    Numeric(String),
    /// Input data violates a structural requirement (shape, scale, missingness).
    #[error("data error: {0}")]
    Data(String),
    /// An optimizer could not be run or returned an unusable state.
    #[error("optimization error: {0}")]
    Optim(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    /// A file could not be parsed into the expected schema.
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
    pub fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }
    pub fn optim(msg: impl Into<String>) -> Self {
        Error::Optim(msg.into())
    }
    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
