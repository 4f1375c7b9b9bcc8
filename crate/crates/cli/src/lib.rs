//! Experiment runner behind the `boundary-rep` binary.

pub mod config;
pub mod experiments;

pub use config::{ModelSpec, RunConfig, TList};
pub use experiments::{run, Experiment, Outcome};
