use thiserror::Error;

/// Crate-wide error type. Variants mirror the failure modes of the public
/// operations: bad lattice data, out-of-range arguments, violated theorem
/// hypotheses, and plumbing failures.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("dimension {dim} exceeds enumeration cap {cap}")]
    DimensionTooLarge { dim: usize, cap: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("gave up after {tries} rejection-sampling tries")]
    RejectionCapExceeded { tries: u32 },

    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse {
        line: usize,
        col: usize,
        msg: String,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
