use std::process::ExitCode;

use clap::Parser;
use densparam_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    ExitCode::from(run(&cli, &mut stdout.lock()))
}
