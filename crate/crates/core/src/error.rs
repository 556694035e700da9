use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the toolkit.
///
/// Variants are split so that callers (the CLI in particular) can tell an
/// invalid input apart from a numerical breakdown.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("mesh has {nodes} nodes, at least {min} are required")]
    TooFewNodes { nodes: usize, min: usize },

    #[error("mesh nodes not strictly increasing at index {index} ({left} >= {right})")]
    NodeOrdering { index: usize, left: f64, right: f64 },

    #[error("node crossing while advancing the mesh at index {index}; increase beta or reduce the time step")]
    NodeCrossing { index: usize },

    #[error("initial mesh did not converge after {iterations} iterations (residual {residual:e})")]
    MeshNotConverged { iterations: usize, residual: f64 },

    #[error("singular tridiagonal system: pivot {pivot:e} at row {row}")]
    Singular { row: usize, pivot: f64 },

    #[error("fixed-point iteration did not converge after {iterations} iterations (change {change:e})")]
    FixedPointNotConverged { iterations: usize, change: f64 },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("solver failure at t* = {time}: {source}")]
    AtTime {
        time: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("solver failure at {timestamp}: {source}")]
    AtTimestamp {
        timestamp: String,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: row {row}: {message}")]
    Data { path: PathBuf, row: usize, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    /// True for failures caused by the inputs rather than by the numerics.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::Invalid(_) | Error::TooFewNodes { .. } | Error::Data { .. } | Error::Io { .. } | Error::Csv(_) => {
                true
            }
            Error::AtTime { source, .. } | Error::AtTimestamp { source, .. } => source.is_validation(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
