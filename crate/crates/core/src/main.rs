use std::process::ExitCode;

use clap::Parser;
use nhfair::cli::{self, Cli};

fn main() -> ExitCode {
    let args = Cli::parse();
    let result = cli::run(&args).and_then(|out| {
        for w in &out.warnings {
            eprintln!("warning: {w}");
        }
        out.write()
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
