//! DebtRank, expected systemic loss and the systemic risk surcharge.

mod debtrank;
mod quote;
mod surcharge;

pub use debtrank::{debtrank, debtrank_profile, expected_systemic_loss, BankCapital, ImpactMatrix, Scratch};
pub use quote::{QuoteEngine, RiskInputs};
pub use surcharge::{effective_spread, select_counterparty, systemic_surcharge, DefaultModel, SurchargeQuote};
