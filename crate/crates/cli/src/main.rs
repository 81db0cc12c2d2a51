use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use gelliptic_cli::{run, tolerance_from, Cli, TOLERANCE_ENV};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // clap uses 0 for --help/--version and 2 for usage errors
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let env = std::env::var(TOLERANCE_ENV).ok();
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    let result = tolerance_from(env.as_deref()).and_then(|tol| run(&cli, tol, &mut lock));
    let _ = lock.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
