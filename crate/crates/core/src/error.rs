use std::path::PathBuf;

use thiserror::Error;

use crate::grid::Representation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid size {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("grid extent must be positive and finite, got {0}")]
    NonPositiveExtent(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("representation mismatch: expected {expected:?}, found {found:?}")]
    RepresentationMismatch {
        expected: Representation,
        found: Representation,
    },

    #[error("non-finite exponent in diagonal factor at flat index {index}")]
    NonFiniteExponent { index: usize },

    #[error("boundary mass {mass:e} exceeds limit {limit:e}")]
    BoundaryMass { mass: f64, limit: f64 },

    #[error("incompatible grids: {0}")]
    IncompatibleGrid(String),

    #[error("polynomial parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("division by zero in exact arithmetic")]
    DivisionByZero,

    #[error("step is not unitary: {0}")]
    NonUnitaryStep(String),

    #[error("decomposition left a nonzero residual: {0}")]
    NonzeroResidual(String),

    #[error("fit needs at least {needed} points above the round-off floor, got {got}")]
    InsufficientFitPoints { needed: usize, got: usize },

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("snapshot {path}: {message}")]
    Snapshot { path: PathBuf, message: String },

    #[error("snapshot {path} truncated: expected bytes {start}..{end}, file has {len}")]
    TruncatedSnapshot {
        path: PathBuf,
        start: u64,
        end: u64,
        len: u64,
    },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }
}
