use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use posmap_cli::commands::{run, Cli, Output};
use posmap_cli::error::{EXIT_INPUT, EXIT_OK};
use serde_json::json;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::from(EXIT_OK as u8),
                _ => ExitCode::from(EXIT_INPUT as u8),
            };
        }
    };
    match run(&cli) {
        Ok(Output::Json(value)) => {
            println!("{value}");
            ExitCode::SUCCESS
        }
        Ok(Output::Text(text)) => {
            println!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            println!("{}", json!({ "error": e.name(), "message": e.to_string() }));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
