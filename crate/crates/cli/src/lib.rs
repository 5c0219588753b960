//! `propci` command-line front end.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod svg;

pub use cli::{Cli, Command};
pub use commands::run;
pub use config::Settings;
pub use error::{CliError, CliResult};
