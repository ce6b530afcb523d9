use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid box: r and s must both be positive (got r={r}, s={s})")]
    InvalidContext { r: usize, s: usize },

    #[error("{parts:?} is not a partition in the {r}x{s} box")]
    InvalidPartition { parts: Vec<usize>, r: usize, s: usize },

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("context mismatch: ({0}, {1}) vs ({2}, {3})")]
    ContextMismatch(usize, usize, usize, usize),

    #[error("arity mismatch: {0}")]
    Arity(String),

    #[error("tensor would have {entries} entries, above the cap of {cap}")]
    ResourceCap { entries: u128, cap: u128 },

    #[error("integrity check failed: {0}")]
    Integrity(String),
}

impl Error {
    /// Integrity failures are reported separately from argument errors by
    /// the command-line front end.
    pub fn is_integrity(&self) -> bool {
        matches!(self, Error::Integrity(_))
    }
}
