use std::process::ExitCode;

use clap::Parser;
use treelike_cli::{execute, Cli, CliError};

fn main() -> ExitCode {
    let cli = Cli::try_parse().unwrap_or_else(|e| e.exit());
    match execute(&cli) {
        Ok(report) => {
            if cli.tsv {
                print!("{}", report.to_tsv());
            } else {
                println!("{}", report.to_json());
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(CliError::Usage(e)) => e.exit(),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
