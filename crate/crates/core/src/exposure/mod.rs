//! The two-layer exposure algebra: gross loans, CDS layers per reference
//! entity, and their collapse into one effective exposure network.

mod cds;
mod effective;
mod ledger;
mod stats;

pub use cds::{CdsBook, CdsContract, ContractId, ContractPolicy};
pub use effective::{effective_exposures, EffectiveExposureNetwork, NakedReceivable};
pub use ledger::{net_loans, ExposureLedger, Loan, LoanId, NetExposureMatrix};
pub use stats::{quantile, weighted_clustering, weighted_in_degree};
