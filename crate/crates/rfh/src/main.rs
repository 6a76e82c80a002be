use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = rfh::cli::Cli::parse();
    ExitCode::from(rfh::cli::main_with(&cli))
}
