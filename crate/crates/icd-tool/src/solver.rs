//! External SMT solver invocation: write the document to a temp file, run a
//! user-supplied command template, capture stdout under a timeout.

use std::io::Read;
use std::path::Path;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use thiserror::Error;

/// Environment variable holding the default solver command template.
pub const SOLVER_ENV: &str = "ICD_SMT_SOLVER";

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("solver binary not found: {cmd}")]
    MissingBinary { cmd: String },
    #[error("solver exited with status {code:?}: {stderr}")]
    NonZeroExit { code: Option<i32>, stderr: String },
    #[error("solver timed out after {0:?}")]
    Timeout(Duration),
    #[error("empty solver command template")]
    EmptyCommand,
    #[error("solver i/o: {0}")]
    Io(#[from] std::io::Error),
}

/// Builds the argv from a whitespace-split template, substituting `{file}`
/// (appended as the last argument when the placeholder is absent).
fn build_argv(template: &str, file: &Path) -> Result<Vec<String>, SolverError> {
    let file_str = file.display().to_string();
    let mut argv: Vec<String> = template.split_whitespace().map(String::from).collect();
    if argv.is_empty() {
        return Err(SolverError::EmptyCommand);
    }
    let mut substituted = false;
    for arg in argv.iter_mut() {
        if arg.contains("{file}") {
            *arg = arg.replace("{file}", &file_str);
            substituted = true;
        }
    }
    if !substituted {
        argv.push(file_str);
    }
    Ok(argv)
}

fn drain(mut r: impl Read + Send + 'static) -> std::thread::JoinHandle<String> {
    std::thread::spawn(move || {
        let mut buf = String::new();
        let _ = r.read_to_string(&mut buf);
        buf
    })
}

/// Writes `document` to a temp file and runs the solver command on it,
/// returning captured stdout. A zero timeout reports `Timeout` immediately.
pub fn run_external_solver(
    template: &str,
    document: &str,
    timeout: Duration,
) -> Result<String, SolverError> {
    let mut tmp = tempfile::Builder::new().suffix(".smt2").tempfile()?;
    std::io::Write::write_all(&mut tmp, document.as_bytes())?;

    let argv = build_argv(template, tmp.path())?;
    let mut child = Command::new(&argv[0])
        .args(&argv[1..])
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| {
            if e.kind() == std::io::ErrorKind::NotFound {
                SolverError::MissingBinary {
                    cmd: argv[0].clone(),
                }
            } else {
                SolverError::Io(e)
            }
        })?;

    let stdout = drain(child.stdout.take().expect("piped stdout"));
    let stderr = drain(child.stderr.take().expect("piped stderr"));

    let deadline = Instant::now() + timeout;
    let status = loop {
        if Instant::now() >= deadline {
            let _ = child.kill();
            let _ = child.wait();
            return Err(SolverError::Timeout(timeout));
        }
        match child.try_wait()? {
            Some(status) => break status,
            None => std::thread::sleep(Duration::from_millis(10)),
        }
    };

    let out = stdout.join().unwrap_or_default();
    let err = stderr.join().unwrap_or_default();
    if status.success() {
        Ok(out)
    } else {
        Err(SolverError::NonZeroExit {
            code: status.code(),
            stderr: err.trim().to_string(),
        })
    }
}
