use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("level {level} outside 1..={max}")]
    LevelOutOfRange { level: usize, max: usize },
    #[error("tuple entries must be nondecreasing: {0:?}")]
    UnsortedTuple(Vec<usize>),
    #[error("pivot set is empty (φ must not vanish identically)")]
    EmptyPivots,
    #[error("table is not downward closed: {0}")]
    NotDownwardClosed(String),
    #[error("table has no nonzero entry (φ must not vanish identically)")]
    ZeroTable,
    #[error("invalid filtration: {0}")]
    InvalidFiltration(String),
    #[error("invalid stability parameter: {0}")]
    InvalidParameter(String),
    #[error("mode mismatch: {0}")]
    ModeMismatch(String),
    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("weights must be strictly positive (component {0})")]
    NonPositiveWeight(usize),
    #[error("instance too large: {size} exceeds guard {guard}")]
    TooLarge { size: usize, guard: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("filtration does not violate the stability condition; nothing to reduce")]
    NotViolating,
    #[error("invalid tensor: {0}")]
    InvalidTensor(String),
    #[error("cannot parse rational {0:?}")]
    ParseRational(String),
}

pub type Result<T> = std::result::Result<T, Error>;
