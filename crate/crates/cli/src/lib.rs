//! Library side of the `tailsum` command: configuration, output formats and
//! the subcommands, so that tests can drive them in-process.

pub mod commands;
pub mod config;
pub mod error;
pub mod format;

pub use commands::{cmd_approx, cmd_mc, cmd_table, cmd_verify, run_mc, workers_from_env};
pub use config::RunConfig;
pub use error::CliError;
