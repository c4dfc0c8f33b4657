//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors produced by constructions, evaluators, and checks.
///
/// `Budget` covers both enumeration limits and enclosure outcomes that are
/// too coarse to decide a verdict ("indeterminate — deepen"): truncation is
/// never allowed to masquerade as an analytic fact.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on a mathematical domain was violated.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configured resource limit was exceeded, or an enclosure was too
    /// coarse to decide a verdict.
    #[error("resource budget exceeded: {0}")]
    Budget(String),

    /// Malformed textual input (rational strings, point sets, metadata).
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn budget(msg: impl Into<String>) -> Self {
        Error::Budget(msg.into())
    }

    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}
