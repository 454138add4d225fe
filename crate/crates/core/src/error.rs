use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the ABC pipeline.
#[derive(Debug, Error)]
pub enum AbcError {
    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("insufficient sample: need at least {needed} values, got {got}")]
    InsufficientSample { needed: usize, got: usize },

    #[error("degenerate normalisation: {0}")]
    DegenerateNormalization(String),

    #[error("empty feature set: {0}")]
    EmptyFeature(String),

    #[error("threshold policy error: {0}")]
    Policy(String),

    #[error("simulation failed for draw {draw} after {attempts} attempts: {reason}")]
    Simulation {
        draw: u64,
        attempts: u32,
        reason: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<AbcError>,
    },

    #[error("i/o error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl AbcError {
    pub fn param(msg: impl Into<String>) -> Self {
        AbcError::ParameterDomain(msg.into())
    }

    pub fn shape(msg: impl Into<String>) -> Self {
        AbcError::Shape(msg.into())
    }

    /// Wraps the error with a description of where it happened.
    pub fn context(self, context: impl Into<String>) -> Self {
        AbcError::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        AbcError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = AbcError> = std::result::Result<T, E>;
