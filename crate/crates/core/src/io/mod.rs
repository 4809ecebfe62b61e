//! Configuration loading, experiment commands and result files.

pub mod command;
pub mod config;
pub mod output;

pub use command::{run_command, run_experiment, CommandError, CommandReport};
pub use config::{
    load_config, parse_config, ConfigError, Experiment, OutputFormat, Overrides, SimConfig,
};
pub use output::{read_results, write_results, OutputError, OutputRow, CSV_HEADER};
