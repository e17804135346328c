use std::process::ExitCode;

use clap::Parser;
use hfavg_cli::{emit, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|out| emit(&cli, &out).map(|_| out.exit_code()));
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("hfavg: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
