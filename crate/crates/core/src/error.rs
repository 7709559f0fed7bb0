use std::path::PathBuf;

use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("coefficient count {got} does not match basis size {expected}")]
    CoefficientLength { expected: usize, got: usize },

    #[error("cannot differentiate degree 0 (factor {factor})")]
    DegreeZero { factor: usize },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("zero vector in tuple slot {0}")]
    ZeroVector(usize),

    #[error("exterior degree overflow: {a} + {b} > {dim}")]
    DegreeOverflow { a: usize, b: usize, dim: usize },

    #[error("f is orbit-degenerate: D01 f vanishes identically")]
    OrbitDegenerate,

    #[error("invalid solver input: {0}")]
    InvalidInput(String),

    #[error("non-integral flag formula value: {0}")]
    NonIntegral(String),

    #[error("unknown campaign: {0}")]
    UnknownCampaign(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
