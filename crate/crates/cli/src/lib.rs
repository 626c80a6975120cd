//! Library side of the `qes` command: configuration, report types and subcommands.

pub mod commands;
pub mod config;
pub mod report;

pub use commands::CliError;
pub use config::{ConfigError, Overrides, RunConfig};
pub use report::Report;
