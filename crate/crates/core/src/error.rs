use thiserror::Error;

/// Errors raised by graph sampling, measurement construction, detection and
/// the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("{what} exceeds capacity ({size} > {limit})")]
    Capacity {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("degenerate phase: zero-valued sample in frequency estimate")]
    DegeneratePhase,

    #[error("no candidate index survives the certainty region")]
    NoCandidate,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
