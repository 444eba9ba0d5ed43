use std::process::ExitCode;

use clap::Parser;
use pam_cli::error::CliError;

fn main() -> ExitCode {
    let cli = pam_cli::Cli::parse();
    match pam_cli::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                CliError::Schema(_) => ExitCode::from(2),
                CliError::CheckFailed(_) => ExitCode::from(3),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
