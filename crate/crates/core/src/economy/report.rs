use serde::{Deserialize, Serialize};

use crate::matrix::{format_money, BankId};

/// Per-step metrics of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub step: u32,
    /// Banks defaulted during the step.
    pub defaults: usize,
    pub cascade_loss: f64,
    pub interbank_volume: f64,
    pub cds_volume: f64,
    pub fund_balance: f64,
    pub mean_debtrank: f64,
}

impl StepReport {
    pub const CSV_HEADER: &'static str =
        "step,defaults,cascade_loss,interbank_volume,cds_volume,fund_balance,mean_debtrank";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.step,
            self.defaults,
            format_money(self.cascade_loss),
            format_money(self.interbank_volume),
            format_money(self.cds_volume),
            format_money(self.fund_balance),
            format_money(self.mean_debtrank),
        )
    }
}

/// Outcome of one insolvency cascade.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeResult {
    pub step: u32,
    /// Banks that failed first; the terminal shock picks one at random.
    pub triggers: Vec<BankId>,
    /// Every failed bank, in order of failure, triggers included.
    pub defaulted: Vec<BankId>,
    /// Rounds in which at least one bank failed, the trigger round
    /// included.
    pub rounds: usize,
    /// Capital destroyed at non-trigger banks: each bank's equity decline,
    /// capped at its positive equity before the cascade.
    pub loss: f64,
    /// Total positive bank equity before the cascade.
    pub capital: f64,
    pub written_off: f64,
    pub protection_paid: f64,
    pub fund_paid: f64,
    /// Protection promised but neither paid by the seller nor guaranteed.
    pub protection_unpaid: f64,
    pub exogenous: bool,
}

impl CascadeResult {
    pub fn size(&self) -> usize {
        self.defaulted.len()
    }

    /// Loss as a share of pre-cascade capital, in `[0, 1]`.
    pub fn relative_loss(&self) -> f64 {
        if self.capital > 0.0 {
            (self.loss / self.capital).clamp(0.0, 1.0)
        } else {
            0.0
        }
    }
}

/// Network statistics of the effective exposure network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSnapshot {
    pub step: u32,
    pub debtrank: Vec<f64>,
    pub in_degree: Vec<f64>,
    pub clustering: Vec<f64>,
    pub interbank_volume: f64,
    pub equity: Vec<f64>,
}

impl NetworkSnapshot {
    pub fn mean_debtrank(&self) -> f64 {
        mean(&self.debtrank)
    }

    pub fn mean_clustering(&self) -> f64 {
        mean(&self.clustering)
    }
}

pub(crate) fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        0.0
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}
