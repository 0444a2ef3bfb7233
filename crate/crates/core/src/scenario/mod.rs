//! Scenario configuration, single runs, Monte Carlo batches and the
//! statistics used to compare regimes.

mod compare;
mod config;
mod monte_carlo;
mod run;
pub mod stats;

pub use compare::{compare_scenarios, CompareOptions, ComparisonReport, OrderingTest, RegimeSummary};
pub use config::{wide_u64, ScenarioConfig, SCHEMA_VERSION};
pub use monte_carlo::{
    monte_carlo, monte_carlo_range, run_seed, splitmix64, Metric, RunSummary, ScenarioAggregate, LOSS_BINS,
};
pub use run::{run_scenario, RunResult};
