use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("query budget of {budget} exhausted")]
    BudgetExceeded { budget: usize },

    #[error("dimension {d} exceeds the supported maximum of {max}")]
    DimensionTooLarge { d: usize, max: usize },

    #[error("coalition bits {bits:#x} are not valid for d={d}")]
    InvalidCoalition { bits: u128, d: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("duplicate support set {0}")]
    DuplicateSupport(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("value table is incomplete: mask {mask:#x} missing")]
    IncompleteTable { mask: usize },

    #[error("line {line}: duplicate mask {mask:#x}")]
    DuplicateMask { line: usize, mask: usize },

    #[error("line {line}: non-finite value")]
    NonFiniteValue { line: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("basis of {terms} terms exceeds the enumeration guard")]
    BasisTooLarge { terms: f64 },

    #[error("regression needs at least one interior sample")]
    NoInteriorSamples,

    #[error("non-finite regression target")]
    NonFiniteTarget,

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("ground truth unavailable for game `{0}`")]
    GroundTruthUnavailable(String),

    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
