use abelkit::commands;
use abelkit::config::{Cli, Settings};
use abelkit::error::CliResult;
use clap::Parser;
use std::process::ExitCode;

fn run(cli: Cli) -> CliResult<bool> {
    let settings = Settings::resolve(cli.settings, cli.config.as_deref())?;
    let outcome = commands::run(cli.command, &settings)?;
    for line in &outcome.summary {
        println!("{line}");
    }
    if !outcome.artifacts.files.is_empty() {
        let dir = settings.out_dir();
        for path in outcome.artifacts.commit(&dir)? {
            println!("wrote {}", path.display());
        }
    }
    Ok(outcome.success)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(2)
        }
    }
}
