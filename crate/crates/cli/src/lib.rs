//! Library side of the `dtlab` binary: command implementations writing CSV or JSON to
//! any writer, and the verification suites they share with the acceptance harness.

pub mod commands;
pub mod format;
pub mod suites;

use std::fmt;

/// Failure modes mapped to process exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or an argument outside a mathematical domain (exit 2).
    Usage(String),
    /// An I/O failure while writing output (exit 2).
    Io(std::io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<dtlab_core::Error> for CliError {
    fn from(e: dtlab_core::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<dtlab_rmt::Error> for CliError {
    fn from(e: dtlab_rmt::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.into())
    }
}

/// Exit code for a command that completed: 0 when every check passed, 1 otherwise.
pub fn exit_code(passed: bool) -> i32 {
    if passed {
        0
    } else {
        1
    }
}

pub const EXIT_USAGE: i32 = 2;
