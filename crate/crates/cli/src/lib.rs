//! Configuration parsing and scenario execution behind the `ctxdep` binary.

pub mod config;
pub mod run;

pub use config::{parse_config, parse_config_with, ConfigError, Overrides, RunConfig, Scenario};
pub use run::{run_scenario, RunOutcome, TestResult};
