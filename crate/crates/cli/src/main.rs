mod args;
mod commands;
mod error;
mod sweep;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Info(a) => commands::info(a),
        Command::Transform(a) => commands::transform(a),
        Command::Constants(a) => commands::constants(a),
        Command::Check(a) => commands::check(a),
        Command::SolveLinear(a) => commands::solve_linear(a),
        Command::SolveNonlinear(a) => commands::solve_nonlinear(a),
        Command::Sweep(a) => sweep::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("abelsob: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
