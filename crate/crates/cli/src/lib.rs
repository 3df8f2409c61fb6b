//! Command-line front end for the `polarimeter` crate.

pub mod commands;
pub mod error;
pub mod input;

pub use commands::{run, Cli, Outcome};
pub use error::CliError;
