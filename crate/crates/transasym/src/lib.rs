//! File formats, configuration and the command-line front end over `transasym-core`.

pub mod cli;
pub mod config;
pub mod criteria;
pub mod error;
pub mod schema;

pub use cli::run;
pub use config::{Precision, RunConfig};
pub use error::CliError;
