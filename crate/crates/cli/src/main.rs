mod args;
mod commands;
mod config;
mod error;
mod reproduce;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;
use config::RunConfig;
use error::CliError;

const THREADS_VAR: &str = "COMPLEX_SPECTRA_THREADS";

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_VAR} must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn parse(args: Vec<std::ffi::OsString>) -> Result<Cli, CliError> {
    Cli::try_parse_from(args).map_err(|e| {
        use clap::error::ErrorKind;
        if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
            let _ = e.print();
            std::process::exit(0);
        }
        let _ = e.print();
        CliError::Usage(e.kind().to_string())
    })
}

fn run() -> Result<commands::Report, CliError> {
    configure_threads()?;
    let mut cli = parse(std::env::args_os().collect())?;
    if let Some(path) = cli.config.take() {
        if cli.command.is_some() {
            return Err(CliError::Usage("give either --config or a subcommand, not both".into()));
        }
        cli = parse(RunConfig::load(&path)?.to_args()?)?;
        if cli.config.is_some() {
            return Err(CliError::Usage("a run configuration cannot name another one".into()));
        }
    }
    let command = cli
        .command
        .ok_or_else(|| CliError::Usage("no subcommand given; see --help".into()))?;
    commands::run(command)
}

fn main() -> ExitCode {
    match run() {
        Ok(report) => {
            if report.stdout_taken {
                eprintln!("{}", report.summary);
            } else {
                println!("{}", report.summary);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
