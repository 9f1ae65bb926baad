//! Errors with source locations and exit codes.

use std::fmt;

use mwk_core::MwkError;

use crate::ast::Pos;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Syntax,
    Domain,
    Capability,
}

#[derive(Clone, Debug)]
pub struct CliError {
    pub kind: ErrorKind,
    pub pos: Option<Pos>,
    pub message: String,
}

impl CliError {
    pub fn syntax(pos: Pos, message: impl Into<String>) -> Self {
        CliError { kind: ErrorKind::Syntax, pos: Some(pos), message: message.into() }
    }

    pub fn domain(pos: Pos, message: impl Into<String>) -> Self {
        CliError { kind: ErrorKind::Domain, pos: Some(pos), message: message.into() }
    }

    /// Attach a position unless one is already known.
    pub fn at(mut self, pos: Pos) -> Self {
        if self.pos.is_none() {
            self.pos = Some(pos);
        }
        self
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Syntax | ErrorKind::Domain => 1,
            ErrorKind::Capability => 2,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            ErrorKind::Syntax => "syntax",
            ErrorKind::Domain => "domain",
            ErrorKind::Capability => "capability",
        }
    }
}

impl From<MwkError> for CliError {
    fn from(e: MwkError) -> Self {
        let kind = match e {
            MwkError::Capability(_) => ErrorKind::Capability,
            _ => ErrorKind::Domain,
        };
        let message = match &e {
            MwkError::Capability(m) => format!("{m} (outside the supported field/degree matrix)"),
            MwkError::Domain(m) => m.clone(),
        };
        CliError { kind, pos: None, message }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.pos {
            Some(p) => write!(f, "{} error at {}:{}: {}", self.kind_name(), p.line, p.col, self.message),
            None => write!(f, "{} error: {}", self.kind_name(), self.message),
        }
    }
}

impl std::error::Error for CliError {}
