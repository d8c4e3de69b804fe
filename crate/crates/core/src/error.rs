use thiserror::Error;

/// Errors raised by the Fock-space primitives and the statistics built on them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("capacity exceeded: {what} of {requested} exceeds limit {limit}")]
    Capacity {
        what: &'static str,
        requested: u128,
        limit: u128,
    },

    #[error("index {index} out of range for {len} modes")]
    ModeIndex { index: usize, len: usize },

    #[error("occupation {occupation} of mode {mode} needs cutoff >= {required}, got {dmax}")]
    Occupation {
        mode: usize,
        occupation: u64,
        required: u64,
        dmax: usize,
    },

    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("effective temperature undefined: {0} positive probabilities, need at least 2")]
    UndefinedTemperature(usize),

    #[error("empty {0}")]
    Empty(&'static str),

    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
