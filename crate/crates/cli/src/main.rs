use std::io;
use std::process::ExitCode;

use a2n2_cli::Cli;
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    ExitCode::from(a2n2_cli::run(&cli, &mut io::stdout().lock(), &mut io::stderr().lock()))
}
