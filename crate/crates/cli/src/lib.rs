//! Command-line front end for the `gelliptic` library.

pub mod args;
pub mod commands;
pub mod output;
pub mod verify;

use std::fmt;
use std::io::Write;

use gelliptic::Tolerance;

pub use args::Cli;
use args::Command;

pub const TOLERANCE_ENV: &str = "GELLIPTIC_TOL";

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or a domain error from the library; exit code 2.
    Usage(String),
    /// At least one verification group failed; exit code 1.
    VerificationFailed,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::VerificationFailed => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => f.write_str(msg),
            CliError::VerificationFailed => f.write_str("verification failed"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<gelliptic::Error> for CliError {
    fn from(e: gelliptic::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

/// Tolerance from `GELLIPTIC_TOL`, or the library default when unset.
pub fn tolerance_from(value: Option<&str>) -> Result<Tolerance<f64>, CliError> {
    match value {
        None => Ok(Tolerance::default()),
        Some(raw) => {
            let v: f64 = raw
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("{TOLERANCE_ENV}={raw:?} is not a decimal real")))?;
            Ok(Tolerance::uniform(v)?)
        }
    }
}

pub fn run(cli: &Cli, tol: Tolerance<f64>, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Const(a) => commands::cmd_const(a, tol, stdout),
        Command::Eval(a) => commands::cmd_eval(a, tol, stdout),
        Command::Eigen(a) => commands::cmd_eigen(a, tol, stdout),
        Command::Spectrum(a) => commands::cmd_spectrum(a, tol, stdout),
        Command::Verify(a) => {
            if verify::run(a.seed, a.only.as_deref(), stdout)? {
                Ok(())
            } else {
                Err(CliError::VerificationFailed)
            }
        }
    }
}
