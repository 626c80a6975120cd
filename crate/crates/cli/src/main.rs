use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qes_cli::{commands, CliError, Overrides, RunConfig};

/// Spectra of quasi-exactly solvable sextic oscillators.
#[derive(Parser)]
#[command(name = "qes", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact energies and polynomial factors of the solvable sector (JSON)
    Exact(Overrides),
    /// Residual curve over an energy window (two-column text)
    Scan(Overrides),
    /// Finite-difference reference spectrum (JSON)
    Reference(Overrides),
    /// Full report: exact, variational, reference and validation sections (JSON)
    Report(Overrides),
}

fn json<T: serde::Serialize>(value: &T) -> Result<String, CliError> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn emit(config: &RunConfig, text: &str) -> Result<(), CliError> {
    match &config.output {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Write {
            path: path.clone(),
            source,
        }),
        None => {
            // a closed pipe is not worth reporting
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
            Ok(())
        }
    }
}

fn run(command: &Command) -> Result<(), CliError> {
    let (Command::Exact(o) | Command::Scan(o) | Command::Reference(o) | Command::Report(o)) = command;
    let config = o.resolve()?;
    let text = match command {
        Command::Exact(_) => json(&commands::exact(&config)?)?,
        Command::Scan(_) => commands::scan(&config)?,
        Command::Reference(_) => json(&commands::reference(&config)?)?,
        Command::Report(_) => json(&commands::report(&config)?)?,
    };
    emit(&config, &text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qes: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
