mod commands;
mod config;
mod json;

use std::process::ExitCode;

use clap::Parser;

use commands::RunError;
use config::RunConfig;

fn main() -> ExitCode {
    let flags = RunConfig::parse();
    let outcome = RunConfig::resolve(flags).map_err(RunError::Input).and_then(|c| {
        let outcome = commands::run(&c)?;
        let text = json::to_string(&outcome.report).map_err(|e| RunError::Input(e.to_string()))?;
        match &c.out {
            Some(path) => std::fs::write(path, text).map_err(|e| RunError::Input(format!("{}: {e}", path.display())))?,
            None => print!("{text}"),
        }
        Ok(outcome)
    });
    match outcome {
        Ok(o) => match o.failure {
            None => ExitCode::SUCCESS,
            Some(inv) => {
                eprintln!("check failed: {inv}");
                ExitCode::from(1)
            }
        },
        Err(RunError::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(RunError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
