//! The `aperylike` command; see [`aperylike_cli`] for the pipelines.

use std::process::ExitCode;

use aperylike_cli::args::RunConfig;
use aperylike_cli::{run, CliError};
use clap::Parser;

fn main() -> ExitCode {
    let cfg = RunConfig::parse();
    match run(&cfg) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
