#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod error;
mod man;
mod model;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, Configurable};
use error::{CliError, CliResult};

const THREADS_ENV: &str = "PRELOG_LAB_THREADS";

fn init_threads() -> CliResult<()> {
    let Ok(text) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize =
        text.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| {
            CliError::usage(format!("{THREADS_ENV} must be a positive integer, got {text:?}"))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::usage(format!("cannot size the thread pool: {e}")))
}

fn run(cli: Cli) -> CliResult<()> {
    init_threads()?;
    match cli.command {
        Command::Spectrum(a) => commands::spectrum(a.resolve()?),
        Command::BoundSweep(a) => commands::bound_sweep(a.resolve()?),
        Command::PrelogReport(a) => commands::prelog(a.resolve()?),
        Command::Szego(a) => commands::szego(a.resolve()?),
        Command::Simulate(a) => commands::simulate(a.resolve()?),
        Command::Miso(a) => commands::miso(a.resolve()?),
        Command::Man(a) => commands::man(a.output.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
