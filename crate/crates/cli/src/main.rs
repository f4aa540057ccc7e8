use std::io::Write;

use clap::Parser;
use pinning_cli::{run, Cli, CliError, EXIT_ERROR};
use serde_json::Value;

// a closed pipe is not worth a panic
fn emit(v: &Value) {
    let text = serde_json::to_string_pretty(v).expect("values serialize");
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            emit(&CliError::Usage(e.to_string().trim().to_string()).to_json());
            std::process::exit(EXIT_ERROR);
        }
    };
    match run(&cli) {
        Ok(out) => {
            emit(&out.json);
            std::process::exit(out.exit);
        }
        Err(e) => {
            emit(&e.to_json());
            std::process::exit(EXIT_ERROR);
        }
    }
}
