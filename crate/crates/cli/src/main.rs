use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use sjg_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(&cli, &mut std::io::stdin().lock()) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("sjg: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    for line in &outcome.notes {
        eprintln!("{line}");
    }
    let written = match &cli.output {
        Some(path) => std::fs::write(path, &outcome.document),
        None => std::io::stdout()
            .lock()
            .write_all(outcome.document.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("sjg: cannot write output: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(outcome.code as u8)
}
