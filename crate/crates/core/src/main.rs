use std::process::ExitCode;

use clap::Parser;
use qrac::cli::{execute, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let rendered = match execute(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &rendered.body),
        None => {
            print!("{}", rendered.body);
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(2);
    }
    if rendered.failures > 0 {
        eprintln!("error: {} dimension(s) failed", rendered.failures);
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
