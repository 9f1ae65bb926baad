//! Error taxonomy shared by every module.
//!
//! `Domain` means the input is mathematically invalid (a zero unit, a reducible
//! stage polynomial, a degenerate Gram matrix). `Capability` means the request
//! is well posed but falls outside the support matrix of the library.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MwkError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("capability error: {0}")]
    Capability(String),
}

impl MwkError {
    pub fn domain(msg: impl Into<String>) -> Self {
        MwkError::Domain(msg.into())
    }

    pub fn capability(msg: impl Into<String>) -> Self {
        MwkError::Capability(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            MwkError::Domain(_) => 1,
            MwkError::Capability(_) => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, MwkError>;
