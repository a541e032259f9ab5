use std::io;
use std::process::ExitCode;

use clap::Parser;

use qc_cli::commands::{execute, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli, &mut io::stdout().lock(), &mut io::stderr().lock()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("qc: {e}");
            ExitCode::from(1)
        }
    }
}
