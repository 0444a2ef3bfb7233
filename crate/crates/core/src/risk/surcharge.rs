use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exposure::LoanId;
use crate::matrix::BankId;

/// Exogenous default probabilities and the discounting used by the surcharge.
///
/// The per-step default density of bank `h` is taken as constant, equal to
/// its default probability, over the contract horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct DefaultModel {
    p_def: Vec<f64>,
    discount: Vec<f64>,
}

impl DefaultModel {
    /// Same probability for every bank, no discounting over `horizon` steps.
    pub fn uniform(n_banks: usize, p_def: f64, horizon: u32) -> Self {
        DefaultModel {
            p_def: vec![p_def; n_banks],
            discount: vec![1.0; horizon as usize],
        }
    }

    pub fn new(p_def: Vec<f64>, discount: Vec<f64>) -> Result<Self> {
        if p_def.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::Config("default probabilities must lie in [0, 1]".into()));
        }
        if discount.iter().any(|d| !(*d > 0.0 && *d <= 1.0)) {
            return Err(Error::Config("discount factors must lie in (0, 1]".into()));
        }
        if discount.is_empty() {
            return Err(Error::Config("surcharge horizon must be at least one step".into()));
        }
        Ok(DefaultModel { p_def, discount })
    }

    pub fn p_def(&self) -> &[f64] {
        &self.p_def
    }

    pub fn discount(&self) -> &[f64] {
        &self.discount
    }

    pub fn horizon(&self) -> usize {
        self.discount.len()
    }

    /// Bare spread `s_m`: the one-step actuarially fair premium.
    pub fn spread(&self, reference: BankId) -> f64 {
        self.p_def[reference.0]
    }

    /// Surcharge for a contract whose marginal expected loss, evaluated at
    /// issuance, is held constant over the horizon.
    pub fn surcharge(&self, delta_el: f64, zeta: f64) -> f64 {
        let series = vec![delta_el; self.horizon()];
        systemic_surcharge(&series, zeta, &self.discount)
    }
}

/// `tau = zeta * max(0, sum_t v(t) dEL(t))`.
///
/// Missing discount factors count as 1.
pub fn systemic_surcharge(delta_series: &[f64], zeta: f64, discount: &[f64]) -> f64 {
    let discounted: f64 = delta_series
        .iter()
        .enumerate()
        .map(|(t, d)| discount.get(t).copied().unwrap_or(1.0) * d)
        .sum();
    if discounted > 0.0 {
        zeta * discounted
    } else {
        0.0
    }
}

/// `s_ij = s_m + tau_ij`.
pub fn effective_spread(bare_spread: f64, surcharge: f64) -> f64 {
    bare_spread + surcharge
}

/// A regulator's quote for one candidate seller.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurchargeQuote {
    pub buyer: BankId,
    pub seller: BankId,
    pub reference_entity: BankId,
    pub reference_loan: LoanId,
    pub delta_el: f64,
    pub tau: f64,
    pub effective_spread: f64,
}

impl SurchargeQuote {
    /// CSV row: `step,buyer,seller,m,delta_el,tau,s_eff`.
    pub fn csv_row(&self, step: u32) -> String {
        format!(
            "{step},{},{},{},{:?},{:?},{:?}",
            self.buyer, self.seller, self.reference_entity, self.delta_el, self.tau, self.effective_spread
        )
    }

    pub const CSV_HEADER: &'static str = "step,buyer,seller,m,delta_el,tau,s_eff";
}

/// The quote with the smallest effective spread. Among equal spreads the
/// quote with the smaller marginal loss wins, then the lowest seller id, so
/// a buyer facing several untaxed sellers is steered to the one that
/// removes the most risk.
pub fn select_counterparty(quotes: &[SurchargeQuote]) -> Option<&SurchargeQuote> {
    quotes.iter().min_by(|a, b| {
        a.effective_spread
            .total_cmp(&b.effective_spread)
            .then(a.delta_el.total_cmp(&b.delta_el))
            .then(a.seller.cmp(&b.seller))
    })
}
