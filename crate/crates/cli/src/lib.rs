//! Configuration parsing and report emission for the `bmetric` command.

pub mod commands;
pub mod config;
pub mod error;

pub use commands::{cmd_describe, cmd_sweep, cmd_verify, DescribeReport, PointRecord, PointValues};
pub use config::{parse_config, OutputFormat, RunConfig};
pub use error::{CliError, ConfigError};
