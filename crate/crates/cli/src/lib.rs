//! Command-line front end: TOML campaign configs, CSV/JSON reports and
//! grouped-bar plot data.

pub mod commands;
pub mod config;
mod error;
pub mod plot;
pub mod report;
pub mod sweep;

pub use error::CliError;
