//! `cutsdp` command-line tool.
//!
//! Exit codes: 0 on success, 2 for invalid input or usage, 3 when an SDP
//! solve stops at the iteration limit.

mod args;
mod commands;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Lib(#[from] cutsdp::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
}

const EXIT_INVALID: u8 = 2;
const EXIT_NONCONVERGED: u8 = 3;

fn main() -> ExitCode {
    let raw: Vec<String> = std::env::args().collect();
    let merged = match args::merge_config(raw) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INVALID);
        }
    };
    let cli = match args::Cli::try_parse_from(merged) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INVALID } else { 0 });
        }
    };
    match commands::run(&cli) {
        Ok(report) => {
            let _ = std::io::stdout().write_all(report.text.as_bytes());
            if report.nonconverged {
                eprintln!("warning: SDP solver did not converge");
                ExitCode::from(EXIT_NONCONVERGED)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INVALID)
        }
    }
}
