//! Configuration, experiment drivers and file output for `unsflow-core`.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::{execute, load, Command, ExperimentSpec};
pub use config::{parse_config, to_toml, Config};
pub use error::{CliError, Result};

/// Crate version with the `git describe` of the build tree.
pub const VERSION: &str = env!("UNSFLOW_VERSION");
