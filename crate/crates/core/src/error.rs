use thiserror::Error;

/// Errors raised by constructions and verifications in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A partial derivative beyond what a model declares was requested.
    #[error("model provides partials up to order {available}, but order {requested} is required")]
    OrderOverflow { requested: usize, available: usize },

    /// A numerical result could not be certified to the requested accuracy.
    #[error("accuracy failure: {0}")]
    Accuracy(String),

    #[error("coefficient overflow: {0}")]
    Overflow(String),

    #[error("aliasing: requested |k| = {requested} exceeds grid Nyquist frequency {nyquist}")]
    Aliasing { requested: f64, nyquist: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
