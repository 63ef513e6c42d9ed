use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use c2_cli::{run, Cli, EXIT_USAGE};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    let code = match run(&cli, &mut lock) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("c2: {e:#}");
            EXIT_USAGE
        }
    };
    let _ = lock.flush();
    ExitCode::from(code)
}
