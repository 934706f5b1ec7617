use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use gdf_cli::args::Cli;
use gdf_cli::output::emit;
use gdf_cli::run::{execute, EXIT_USAGE};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    match execute(&cli) {
        Ok(outcome) => {
            if let Err(e) = emit(&outcome.report, cli.global.format, cli.global.output.as_deref()) {
                eprintln!("error: writing report: {e}");
                return ExitCode::from(EXIT_USAGE);
            }
            ExitCode::from(outcome.exit_code)
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.exit_code)
        }
    }
}
