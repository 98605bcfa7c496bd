//! Front end for the wsts toolkit: a model language, query dispatch and
//! report rendering. The `wsts` binary is a thin wrapper around this crate.

pub mod dsl;
pub mod query;
pub mod report;

use thiserror::Error;

pub use dsl::{emit_model, parse_model, parse_target, Diagnostic, DiagnosticKind, Model, Target};
pub use query::{run_decide, run_query, AbstractMode, Analysis, Options, Query};
pub use report::{emit_report, Format, Outcome, Report, Stats};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}:{source}")]
    Parse { path: String, source: Diagnostic },
    /// Malformed arguments or input that fails validation outside the model file.
    #[error("{0}")]
    Usage(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("budget exhausted: {0}")]
    Budget(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 input, 3 unsupported, 4 budget, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Usage(_) => 2,
            CliError::Unsupported(_) => 3,
            CliError::Budget(_) => 4,
            CliError::Internal(_) | CliError::Io { .. } => 1,
        }
    }
}

/// Blanks `#` comments while keeping line and column positions.
pub fn strip_comments(text: &str) -> String {
    text.lines()
        .map(|l| match l.find('#') {
            Some(i) => &l[..i],
            None => l,
        })
        .collect::<Vec<_>>()
        .join("\n")
}
