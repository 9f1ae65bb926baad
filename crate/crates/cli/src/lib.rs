//! Script language and runner for the `mwk` command-line tool.
//!
//! A script is a sequence of one-line statements binding fields, extensions,
//! elements and divisors, and commands that print results.

pub mod ast;
pub mod error;
pub mod eval;
pub mod lexer;
pub mod output;
pub mod parser;

pub use error::{CliError, ErrorKind};
pub use eval::{Record, Session};
pub use parser::{parse_expr, parse_line, parse_script, parse_unit};

/// Records produced by a run, and the error that stopped it, if any.
#[derive(Debug, Default)]
pub struct RunOutput {
    pub records: Vec<Record>,
    pub error: Option<CliError>,
}

impl RunOutput {
    pub fn exit_code(&self) -> i32 {
        match &self.error {
            Some(e) => e.exit_code(),
            None if self.records.iter().any(output::is_failure) => 1,
            None => 0,
        }
    }
}

/// Parse and run a whole script, stopping at the first error.
pub fn run_source(src: &str) -> RunOutput {
    run_source_in(&mut Session::new(), src)
}

pub fn run_source_in(session: &mut Session, src: &str) -> RunOutput {
    let script = match parse_script(src) {
        Ok(s) => s,
        Err(e) => return RunOutput { records: Vec::new(), error: Some(e) },
    };
    let mut out = RunOutput::default();
    for stmt in &script.stmts {
        match session.exec(stmt) {
            Ok(Some(r)) => out.records.push(r),
            Ok(None) => {}
            Err(e) => {
                out.error = Some(e);
                break;
            }
        }
    }
    out
}
