use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = ppsf_cli::Cli::parse();
    match ppsf_cli::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
