//! Seeded simulation: scenario generation, error metrics and a replication
//! runner.

mod config;
mod generate;
mod metrics;
pub mod presets;
mod runner;

pub use config::{Dependence, NullMode, ScenarioConfig, FULL_BLOCK};
pub use generate::{generate_scenario, null_zvalues, rep_rng};
pub use metrics::{average_power, fdp, Confusion};
pub use runner::{run_experiment, GroupCutoffs, ProcedureSummary, RepRecord, RunSummary};
