//! The closed agent-based economy: households, firms and banks meeting on
//! the credit, interbank, CDS, job and goods markets.
//!
//! Every payment is a [`transfer`](EconomyState::transfer) between two
//! holders. Household and firm accounts are deposits, so a payment between
//! accounts at different banks moves reserves between those banks; the
//! sum of reserves and the guarantee fund never changes.

mod agents;
mod cds_market;
mod defaults;
mod markets;
mod params;
mod report;
mod state;

pub use agents::{Bank, Firm, FirmLoan, GuaranteeFund, Household, HouseholdKind};
pub use markets::CreditRequest;
pub use params::{AbmParams, Regime};
pub use report::{CascadeResult, NetworkSnapshot, StepReport};
pub use state::{EconomyState, Party};

#[cfg(test)]
mod tests;
