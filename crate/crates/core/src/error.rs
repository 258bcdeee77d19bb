use thiserror::Error;

/// Errors raised by configuration checks and contract violations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter combination violates a configuration invariant.
    #[error("invalid configuration: {0}")]
    Config(String),
    /// A caller broke a documented precondition (wrong length, index out of range, ...).
    #[error("contract violation: {0}")]
    Contract(String),
    /// The request is well-formed but too large to evaluate.
    #[error("unsupported size: {0}")]
    UnsupportedSize(String),
    /// The requested scheme has no simulation chain.
    #[error("unsupported scheme: {0}")]
    UnsupportedScheme(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

pub(crate) fn contract(msg: impl Into<String>) -> Error {
    Error::Contract(msg.into())
}
