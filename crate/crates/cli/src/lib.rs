//! Command-line front end for the `ucp-core` engines.

pub mod cli;
pub mod commands;
pub mod config;
pub mod output;

use std::io::Write;

use cli::{Cli, Command};
use commands::CliError;
use config::RunConfig;

/// Runs one parsed invocation and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let config = match cli.command.resolve() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("usage error: {e}");
            return 2;
        }
    };
    match execute(&cli.command, &config) {
        Ok((text, code)) => match emit(&config, &text) {
            Ok(()) => code,
            Err(e) => {
                eprintln!("error: {e}");
                1
            }
        },
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

/// Rendered output and exit code, evaluated on a pool of `config.workers`.
pub fn execute(command: &Command, config: &RunConfig) -> Result<(String, i32), CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| CliError::Domain(format!("cannot start worker pool: {e}")))?;
    pool.install(|| {
        let report = match command {
            Command::Validate(_) => {
                let (report, valid) = commands::validate(config)?;
                return Ok((report.render(), if valid { 0 } else { 1 }));
            }
            Command::Layout(_) => commands::layout(config)?,
            Command::Transmit(_) => commands::transmit(config)?,
            Command::Sweep(_) => commands::sweep(config)?,
            Command::Grid(_) => commands::grid(config)?,
            Command::Saturate(_) => commands::saturate(config)?,
            Command::Scaling(_) => commands::scaling(config)?,
            Command::Resonances(_) => commands::resonances(config)?,
            Command::Descriptors(_) => commands::descriptors(config)?,
        };
        Ok((report.render(), 0))
    })
}

fn emit(config: &RunConfig, text: &str) -> std::io::Result<()> {
    match &config.out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}
