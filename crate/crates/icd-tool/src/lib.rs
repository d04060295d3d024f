//! Command-line front end tying signal generation, simulation, attack
//! synthesis, SMT emission/solving and validation into reproducible
//! experiments.
//!
//! All randomness flows from explicit seeds, report files are byte-stable
//! across re-runs, and outputs are written atomically (temp file + rename).
//! Wall-clock timings go to stderr only, so the report files stay
//! reproducible.

pub mod cli;
pub mod formats;
pub mod solver;

use std::path::PathBuf;
use thiserror::Error;

/// Tool-level error, carrying its process exit code:
/// 1 usage, 2 data, 3 solver.
#[derive(Debug, Error)]
pub enum ToolError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Solver(String),
}

impl ToolError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ToolError::Usage(_) => 1,
            ToolError::Data(_) | ToolError::Io { .. } => 2,
            ToolError::Solver(_) => 3,
        }
    }

    pub fn data(e: impl std::fmt::Display) -> Self {
        ToolError::Data(e.to_string())
    }
}

pub(crate) fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> ToolError {
    let path = path.into();
    move |source| ToolError::Io { path, source }
}

/// Parses arguments and runs the selected command, returning the process
/// exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    use clap::Parser;
    let cli = match cli::Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are successful exits
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match cli::dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
