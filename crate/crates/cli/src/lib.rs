//! Command-line front end for `fanofit`.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 fit failure, 3 malformed input or
//! invalid arguments. Warnings are reported in the output and never change
//! the exit code.

pub mod cli;
pub mod commands;
pub mod error;
pub mod report;
pub mod traceio;

use clap::error::ErrorKind as ClapKind;
use clap::Parser;

use crate::cli::{Cli, Command};
use crate::error::{CliError, CliResult, ErrorKind};

/// Environment variable capping the worker threads of batch commands.
pub const THREADS_ENV: &str = "FANOFIT_THREADS";

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::parse(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    // A pool may already exist when called twice in one process; keep it.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

pub fn dispatch(cli: &Cli) -> CliResult<i32> {
    configure_threads()?;
    match &cli.command {
        Command::Fit(a) => commands::fit(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Trajectory(a) => commands::trajectory(a),
        Command::Bands(a) => commands::bands(a),
        Command::Synth(a) => commands::synth(a),
    }
}

/// Parses the process arguments, runs the command and returns the exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ClapKind::DisplayHelp | ClapKind::DisplayVersion => 0,
                _ => ErrorKind::Parse.exit_code(),
            };
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            let record = e.record(None);
            eprintln!("{}", serde_json::to_string(&record).expect("error record serializes"));
            e.exit_code()
        }
    }
}
