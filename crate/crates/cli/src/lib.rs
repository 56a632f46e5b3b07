//! Library side of the `posmap` command-line tool.

pub mod commands;
pub mod error;
pub mod files;
pub mod sweepcsv;

pub use error::CliError;
