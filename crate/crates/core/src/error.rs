use thiserror::Error;

/// Errors raised by builders, spectral routines and pseudomode experiments.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("sphere point has radius {radius}, expected 0.5")]
    SphereOffShell { radius: f64 },

    #[error("symbols live on different phase spaces ({left} vs {right})")]
    MixedSpaces { left: &'static str, right: &'static str },

    #[error("bad dimension: level {0} is not allowed here")]
    BadDimension(usize),

    #[error("squeezing parameter |mu| = {0} must be < 1")]
    NotNormalizable(f64),

    #[error("action-angle conversion failed: {0}")]
    ConversionFailure(String),

    #[error("numerical failure in {context}")]
    NumericalFailure { context: String },

    #[error("basis {mode} does not match symbol space {space}")]
    BasisMismatch { mode: &'static str, space: &'static str },

    #[error("bracket order exceeds depth {0} on the level set")]
    OrderUnbounded(usize),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub(crate) fn numerical(context: impl Into<String>) -> Self {
        Error::NumericalFailure { context: context.into() }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
