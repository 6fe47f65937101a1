//! Config-driven runner for the causal interferometer simulator.

pub mod config;
pub mod run;

pub use config::{load_config, parse_config, validate, ExperimentConfig, Finding, Scenario};
pub use run::{run, Check, RunReport};
