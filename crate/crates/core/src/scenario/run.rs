use serde::{Deserialize, Serialize};

use super::config::ScenarioConfig;
use crate::economy::{CascadeResult, EconomyState, NetworkSnapshot, Regime, StepReport};
use crate::error::Result;

/// Outcome of one simulated run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub regime: Regime,
    pub seed: u64,
    pub reports: Vec<StepReport>,
    /// `None` when the run ended without any bank failing.
    pub cascade: Option<CascadeResult>,
    /// Statistics of the network the run ended with (right before the
    /// cascade, if there was one).
    pub network: NetworkSnapshot,
    pub fund_balance: f64,
    pub firm_bankruptcies: u32,
}

impl RunResult {
    pub fn steps_run(&self) -> usize {
        self.reports.len()
    }

    pub fn loss(&self) -> f64 {
        self.cascade.as_ref().map_or(0.0, |c| c.loss)
    }

    pub fn relative_loss(&self) -> f64 {
        self.cascade.as_ref().map_or(0.0, CascadeResult::relative_loss)
    }

    /// Banks failed in the cascade, trigger included.
    pub fn cascade_size(&self) -> usize {
        self.cascade.as_ref().map_or(0, CascadeResult::size)
    }

    pub fn mean_debtrank(&self) -> f64 {
        self.network.mean_debtrank()
    }

    pub fn mean_clustering(&self) -> f64 {
        self.network.mean_clustering()
    }
}

/// Runs one economy with `cfg.seed` for `cfg.steps` steps or until the
/// first cascade has been resolved.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunResult> {
    let mut state = EconomyState::new(cfg, cfg.seed)?;
    Ok(run_to_end(&mut state, cfg))
}

pub(crate) fn run_to_end(state: &mut EconomyState, cfg: &ScenarioConfig) -> RunResult {
    let mut reports = Vec::with_capacity(cfg.steps as usize);
    while state.step_index() < cfg.steps && !state.halted() {
        reports.push(state.step());
    }
    let network = match state.snapshot() {
        Some(s) => s.clone(),
        None => state.network_snapshot(),
    };
    RunResult {
        regime: cfg.regime,
        seed: cfg.seed,
        reports,
        cascade: state.cascade().cloned(),
        network,
        fund_balance: state.fund().balance,
        firm_bankruptcies: state.firms().iter().map(|f| f.bankruptcies).sum(),
    }
}
