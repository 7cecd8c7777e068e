//! Scenario runner and data exporter for `bohmflow`.

pub mod config;
pub mod error;
pub mod export;
pub mod scenario;

pub use config::{ConfigLayer, Preset, ScenarioConfig};
pub use error::{CliError, CliResult};
pub use scenario::{run_scenario, RunManifest};
