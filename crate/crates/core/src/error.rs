use thiserror::Error;

/// Errors raised by the enumeration, asymptotic and permutation routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("tree of size {size} is too small (need more than {min} leaves)")]
    SizeTooSmall { size: usize, min: usize },

    #[error("size {n} exceeds the enumeration cap {cap}")]
    CapExceeded { n: usize, cap: usize },

    #[error("node path {0} does not address a node of this tree")]
    InvalidNode(String),

    #[error("index {index} out of range for a permutation of size {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("not a permutation of 1..n: {0}")]
    InvalidPermutation(String),

    #[error("permutation contains 132 at positions {positions:?} (1-based)")]
    NotAv132 { positions: [usize; 3] },

    #[error(
        "k = {k} is not below the truncation order m = {m}: the truncated series agrees with \
         the unconstrained one and the singularity can no longer be separated from it"
    )]
    KTooLargeForTruncation { k: usize, m: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("root finding did not converge: {0}")]
    NoConvergence(String),

    #[error("expected {expected} leaf names, got {got}")]
    NameCountMismatch { expected: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
