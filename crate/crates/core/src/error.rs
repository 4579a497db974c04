use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("extension degree must be at least 1")]
    ZeroDegree,

    #[error("field order {p}^{r} exceeds the supported maximum of {max}")]
    FieldTooLarge { p: u64, r: u32, max: u64 },

    #[error("element index {index} out of range for a field of order {order}")]
    ElementOutOfRange { index: u32, order: u32 },

    #[error("{0} is not a prime power")]
    NotPrimePower(u64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid design: {0}")]
    InvalidDesign(String),

    #[error("invalid coalition: {0}")]
    InvalidCoalition(String),

    #[error("{what} limit exceeded: d = {d} but the limit is {limit}")]
    LimitExceeded { what: &'static str, d: usize, limit: usize },

    #[error("matrix is not positive definite (pivot {pivot} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("no exact oracle or pseudo-truth available for game `{0}`")]
    NoTruth(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}

/// Reads a whole file, naming it in the error.
pub(crate) fn read_text(path: &std::path::Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}
