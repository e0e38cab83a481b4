use thiserror::Error;

/// Errors surfaced by parsing, field construction and the solvers.
///
/// Structural misuse (dimension mismatches, out-of-bounds views, field
/// mixing) panics instead; those are caller bugs, not runtime conditions.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("malformed header: expected \"rows cols p\", got {0:?}")]
    BadHeader(String),

    #[error("invalid number {0:?}")]
    BadNumber(String),

    #[error("expected {expected} entries, found {found}")]
    WrongEntryCount { expected: usize, found: usize },

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("p = {p} too large for a {gamma}-bit backend")]
    PrimeTooLarge { p: u64, gamma: u32 },

    #[error("p = 2 requires the positive representation")]
    BalancedEven,

    #[error("no valid accumulation count for p = {p} at {gamma} bits")]
    NoValidLambda { p: u64, gamma: u32 },

    #[error("division by zero in the field")]
    ZeroInverse,

    #[error("singular system: zero diagonal element at index {index}")]
    Singular { index: usize },

    #[error("matrix is singular: rank {rank} < {n}")]
    SingularRank { rank: usize, n: usize },

    #[error("zero leading principal minor of order {order}")]
    NonGenericMinor { order: usize },

    #[error("matrix is not symmetric")]
    Asymmetric,

    #[error("pseudo-inverse failed at stage {stage}: {reason}")]
    PinvStage {
        stage: &'static str,
        reason: &'static str,
    },

    #[error("{requested} recursive levels requested but only {admissible} fit in the backend")]
    LevelTooDeep { requested: u32, admissible: u32 },
}

pub type Result<T> = std::result::Result<T, Error>;
