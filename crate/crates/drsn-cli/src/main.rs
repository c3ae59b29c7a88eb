use std::process::ExitCode;

use clap::Parser;
use drsn_cli::cli::Cli;
use drsn_cli::config::{load_config, FileConfig};
use drsn_cli::error::{EXIT_CHECK_FAILED, EXIT_INPUT};
use drsn_cli::run::run;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_INPUT)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = cli
        .config
        .as_deref()
        .map_or(Ok(FileConfig::default()), load_config)
        .and_then(|config| cli.command.resolve(&config))
        .and_then(|command| run(&command));
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_CHECK_FAILED),
        Err(e) => {
            eprintln!("drsn: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
