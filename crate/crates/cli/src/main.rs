//! `bayes`: batch front end to `bayes_core`.
//!
//! Exit status: 0 on success, 2 for bad flags or input, 3 when the
//! computation itself fails (improper posterior, rank deficiency, a grid
//! that cannot reach the requested coverage).

mod args;
mod commands;
mod error;
mod input;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use error::CliError;
use output::Report;

fn dispatch(cli: &Cli) -> Result<Report, CliError> {
    match &cli.command {
        Command::Estimate(a) => commands::estimate::run(a, cli.seed),
        Command::Hpd(a) => commands::hpd::run(a, cli.seed),
        Command::Test(a) => commands::test::run(a, cli.seed),
        Command::Regress(a) => commands::regress::run(a, cli.seed),
        Command::Predict(a) => commands::predict::run_predict(a, cli.seed),
        Command::Outliers(a) => commands::predict::run_outliers(a, cli.seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(report) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(report.render(cli.format).as_bytes()).is_err() {
                return ExitCode::from(error::EXIT_INPUT);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
