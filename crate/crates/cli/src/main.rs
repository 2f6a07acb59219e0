use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use tlcalc::{run, tolerance_from, Cli, TOLERANCE_VAR};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let env = std::env::var(TOLERANCE_VAR).ok();
    let code = match tolerance_from(env.as_deref()).and_then(|tol| run(&cli.command, tol)) {
        Ok(outcome) => {
            // A closed pipe (`tlcalc ... | head`) is not an error worth reporting.
            let _ = writeln!(std::io::stdout().lock(), "{}", outcome.output);
            outcome.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
