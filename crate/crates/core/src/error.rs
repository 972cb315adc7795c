use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch for {what}: expected {expected}, got {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("unknown metric `{0}`")]
    NotFound(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("numerical domain error: {0}")]
    NumericalDomain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("grid of {requested} points exceeds the cap of {cap} points")]
    ResourceLimit { requested: u128, cap: u128 },

    #[error("degenerate output: {0}")]
    Degenerate(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn dims(what: &'static str, expected: usize, found: usize) -> Self {
        Error::DimensionMismatch {
            what,
            expected,
            found,
        }
    }
}
