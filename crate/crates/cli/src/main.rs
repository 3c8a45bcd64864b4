mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::{write_output, CliResult};

fn execute(cli: Cli) -> CliResult<()> {
    let (text, common) = match &cli.command {
        Command::Solve { common } => (commands::solve(common)?, common),
        Command::Eval { common, grid, series } => (commands::eval(common, grid, series.as_deref())?, common),
        Command::Residual { common, grid } => (commands::residuals(common, grid)?, common),
        Command::Hcurve { common, probe, h_min, h_max, n } => {
            (commands::hcurve(common, probe, *h_min, *h_max, *n)?, common)
        }
        Command::Compare { common, grid } => (commands::compare(common, grid)?, common),
    };
    write_output(&text, common.out.as_deref())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hatm: {e}");
            ExitCode::from(e.code)
        }
    }
}
