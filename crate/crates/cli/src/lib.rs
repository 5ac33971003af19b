//! Library side of the `loopcoh` command: document parsing, dispatch and
//! report rendering.

pub mod parse;
pub mod report;
pub mod run;

pub use parse::{parse_problem, print_problem, AlgebroidKind, ProblemSpec};
pub use report::{emit_report, Mode, Record, Report};
pub use run::{run_command, Command, Options};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CliError {
    #[error("cli: line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("cli: {0}")]
    Input(String),
    #[error(transparent)]
    Domain(#[from] loopcoh::Error),
}
