use thiserror::Error;

/// Errors produced by the numerical routines and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("gradient descent diverged at iteration {iteration}: loss {loss} exceeds 10x initial loss {initial}")]
    Divergence { iteration: usize, loss: f64, initial: f64 },

    #[error("data is not linearly separable: {0}")]
    NotSeparable(String),

    #[error("malformed IDX data: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
