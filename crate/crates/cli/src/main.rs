mod args;
mod commands;
mod error;
mod model;
mod output;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let result = match &cli.command {
        Command::Dos(a) => commands::dos(a),
        Command::Roots(a) => commands::roots(a),
        Command::Expect(a) => commands::expect(a),
        Command::Trace(a) => commands::trace(a),
        Command::Symbol(a) => commands::symbol(a),
        Command::Verify(a) => commands::verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("asymspec: {e}");
            e.exit_code()
        }
    }
}
