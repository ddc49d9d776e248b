use thiserror::Error;

/// Errors raised by the set algebra, the matching engine and the witness algebra.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operands belong to different universes")]
    UniverseMismatch,

    #[error("unknown generator label `{0}`")]
    UnknownLabel(String),

    #[error("resource cap exceeded: {what} = {value} (cap {cap})")]
    Resource { what: &'static str, value: u64, cap: u64 },

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    #[error("internal invariant broken: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn malformed(msg: impl Into<String>) -> Self {
        Error::Malformed(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn hypothesis(msg: impl Into<String>) -> Self {
        Error::Hypothesis(msg.into())
    }

    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }

    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Resource { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
