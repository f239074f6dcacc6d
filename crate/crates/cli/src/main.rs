use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let result = uwu_cli::run(uwu_cli::Cli::parse());
    if let Err(e) = &result {
        eprintln!("error: {e:#}");
    }
    ExitCode::from(uwu_cli::exit_code(&result))
}
