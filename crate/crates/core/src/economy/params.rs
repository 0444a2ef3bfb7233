use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exposure::ContractPolicy;

/// Market regime of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Interbank loans only.
    NoCds,
    /// Loans only, with a flat tax added to every interbank rate.
    TobinTax,
    /// Covered CDSs from random sellers plus speculative naked CDSs.
    UnregulatedNaked,
    /// Covered CDSs only, priced with the systemic surcharge.
    RegulatedCovered,
}

impl Regime {
    pub const ALL: [Regime; 4] = [
        Regime::NoCds,
        Regime::TobinTax,
        Regime::UnregulatedNaked,
        Regime::RegulatedCovered,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Regime::NoCds => "no_cds",
            Regime::TobinTax => "tobin_tax",
            Regime::UnregulatedNaked => "unregulated_naked",
            Regime::RegulatedCovered => "regulated_covered",
        }
    }

    pub fn has_cds(self) -> bool {
        matches!(self, Regime::UnregulatedNaked | Regime::RegulatedCovered)
    }

    pub fn policy(self) -> ContractPolicy {
        match self {
            Regime::UnregulatedNaked => ContractPolicy::AllowNaked,
            _ => ContractPolicy::CoveredOnly,
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Regime::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown regime `{s}`")))
    }
}

/// Behavioural parameters of the economy. All rates are per step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AbmParams {
    /// Wage `w` paid to each employed worker.
    pub wage: f64,
    /// Output `alpha` of one worker.
    pub productivity: f64,
    /// Share `c` of its account a household spends each step.
    pub consumption_share: f64,
    /// Number `z` of firms a household compares.
    pub search_breadth: usize,
    /// Number `n` of banks a firm asks for credit.
    pub bank_search: usize,
    /// Rate `r_max` above which a firm scales its request down.
    pub rate_ceiling: f64,
    /// Fraction `phi` of the desired volume asked for above `r_max`.
    pub reduced_ask: f64,
    /// Largest per-step relative price or quantity adjustment.
    pub adjustment: f64,

    /// Fraction of the face value repaid each step; also sets the loan and
    /// CDS term.
    pub repayment_fraction: f64,
    pub firm_base_rate: f64,
    /// Upper end of the uniform bank specificity on firm loans.
    pub bank_specificity: f64,
    /// `kappa` in `kappa * debt / (liquidity + epsilon)`.
    pub fragility_premium: f64,
    pub fragility_epsilon: f64,

    pub interbank_base_rate: f64,
    /// Upper end of the uniform lender specificity on interbank loans.
    pub interbank_specificity: f64,
    /// Premium per unit of the borrower's interbank leverage.
    pub interbank_premium: f64,

    /// Reserves a bank keeps against its deposits before lending.
    pub reserve_ratio: f64,
    /// Initial bank equity as a fraction of initial deposits; also the
    /// level above which banks pay dividends.
    pub capital_ratio: f64,
    /// Share of equity above target paid out each step.
    pub bank_payout: f64,
    /// Share of positive firm profit paid to the owner.
    pub firm_payout: f64,

    pub initial_account: f64,
    pub initial_firm_liquidity: f64,
    pub initial_price: f64,
    /// Initial expected demand per firm, in output units.
    pub initial_demand: f64,

    /// Probability that a lender insures a fresh interbank loan.
    pub cds_demand: f64,
    /// Per-bank, per-step probability of buying one naked CDS.
    pub naked_demand: f64,
    pub fund_seed_capital: f64,
    /// Defaults a random bank at the last step if no endogenous cascade
    /// has stopped the run.
    pub terminal_shock: bool,
    /// Keep every regulator quote in the state's quote log.
    pub log_quotes: bool,
}

impl Default for AbmParams {
    fn default() -> Self {
        AbmParams {
            wage: 1.0,
            productivity: 1.0,
            consumption_share: 0.8,
            search_breadth: 2,
            bank_search: 2,
            rate_ceiling: 0.06,
            reduced_ask: 0.5,
            adjustment: 0.1,
            repayment_fraction: 0.2,
            firm_base_rate: 0.02,
            bank_specificity: 0.02,
            fragility_premium: 0.01,
            fragility_epsilon: 1.0,
            interbank_base_rate: 0.01,
            interbank_specificity: 0.01,
            interbank_premium: 0.001,
            reserve_ratio: 0.5,
            capital_ratio: 0.1,
            bank_payout: 0.5,
            firm_payout: 1.0,
            initial_account: 1.2,
            initial_firm_liquidity: 0.0,
            initial_price: 1.0,
            initial_demand: 12.0,
            cds_demand: 1.0,
            naked_demand: 0.5,
            fund_seed_capital: 0.0,
            terminal_shock: true,
            log_quotes: false,
        }
    }
}

impl AbmParams {
    /// Steps until a loan repaying `repayment_fraction` per step is paid off.
    pub fn loan_term(&self) -> u32 {
        (1.0 / self.repayment_fraction).ceil() as u32
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("wage", self.wage),
            ("productivity", self.productivity),
            ("initial_price", self.initial_price),
            ("fragility_epsilon", self.fragility_epsilon),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("abm.{name} must be positive, got {v}")));
            }
        }
        let fractions = [
            ("consumption_share", self.consumption_share),
            ("reduced_ask", self.reduced_ask),
            ("adjustment", self.adjustment),
            ("reserve_ratio", self.reserve_ratio),
            ("capital_ratio", self.capital_ratio),
            ("bank_payout", self.bank_payout),
            ("firm_payout", self.firm_payout),
            ("cds_demand", self.cds_demand),
            ("naked_demand", self.naked_demand),
            ("rate_ceiling", self.rate_ceiling),
            ("firm_base_rate", self.firm_base_rate),
            ("bank_specificity", self.bank_specificity),
            ("interbank_base_rate", self.interbank_base_rate),
            ("interbank_specificity", self.interbank_specificity),
        ];
        for (name, v) in fractions {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Config(format!("abm.{name} must lie in [0, 1], got {v}")));
            }
        }
        if !(self.repayment_fraction > 0.0 && self.repayment_fraction <= 1.0) {
            return Err(Error::Config(format!(
                "abm.repayment_fraction must lie in (0, 1], got {}",
                self.repayment_fraction
            )));
        }
        let non_negative = [
            ("fragility_premium", self.fragility_premium),
            ("interbank_premium", self.interbank_premium),
            ("initial_account", self.initial_account),
            ("initial_firm_liquidity", self.initial_firm_liquidity),
            ("initial_demand", self.initial_demand),
            ("fund_seed_capital", self.fund_seed_capital),
        ];
        for (name, v) in non_negative {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("abm.{name} must be non-negative, got {v}")));
            }
        }
        if self.search_breadth == 0 || self.bank_search == 0 {
            return Err(Error::Config("abm.search_breadth and abm.bank_search must be at least 1".into()));
        }
        Ok(())
    }
}
