//! Command-line front end: argument model, command pipelines and report
//! rendering. The `aperylike` binary is a thin wrapper over [`run`].
//!
//! Exit status: 0 when every requested check passes, 1 on a verification
//! failure (the report carries the witness), 2 on usage or I/O errors.

pub mod args;
pub mod commands;
pub mod output;

use aperylike::ModularEngine;

use args::{Command, RunConfig};
pub use commands::CliError;

/// Runs one command and writes its report. `Ok(false)` means a requested
/// verification failed.
pub fn run(cfg: &RunConfig) -> Result<bool, CliError> {
    let engine = ModularEngine::new();
    let out = match &cfg.command {
        Command::Seq(a) => commands::seq(a)?,
        Command::Verify(a) => commands::verify(a, &engine)?,
        Command::Survey(a) => {
            let (out, curve) = commands::survey(a, cfg.workers)?;
            if let (Some(path), Some(body)) = (&a.curve, curve) {
                output::emit(&body, Some(path))?;
            }
            out
        }
        Command::Period(a) => commands::period(a, &engine)?,
        Command::Ct(a) => commands::ct(a)?,
        Command::Report(a) => commands::report(a, cfg.workers)?,
    };
    output::emit(&out.render(cfg.format), cfg.output.as_deref())?;
    Ok(out.passed)
}
