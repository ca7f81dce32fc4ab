use thiserror::Error;

use crate::families::KSet;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Parameters violate an operation's preconditions.
    #[error("domain error: {0}")]
    Domain(String),

    /// Instance lies outside the supported size envelope.
    #[error("capacity error: {0}")]
    Capacity(String),

    /// A quantity needed by the computation vanished (zero normalizer, flat derivative).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A built configuration failed its own verification.
    #[error("construction failed verification: {reason} (tuple: {tuple:?})")]
    Construction { reason: String, tuple: Vec<KSet> },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
