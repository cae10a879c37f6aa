//! Library half of the command-line runner: configuration parsing, the
//! evolve/steady/sweep commands, named studies and CSV emission. The binary
//! in `main.rs` is a thin argument layer over these.

pub mod commands;
pub mod config;
pub mod scenario;
pub mod table;

pub use commands::{evolve_table, run_command, steady_table, sweep_grid, sweep_table};
pub use config::{
    parse_config, parse_config_with_overrides, validate_params, ConfigError, ModelParams,
    ParamMap, ParamValue, RunConfig, RunMode, ScenarioName,
};
pub use scenario::{run_scenario, ScenarioOutput};
pub use table::{Cell, Table};
