use serde::{Deserialize, Serialize};

use super::cds::CdsBook;
use super::ledger::{ExposureLedger, NetExposureMatrix};
use crate::matrix::{BankId, Matrix};

/// A naked-CDS payout that the effective network cannot represent: when
/// `reference_entity` defaults, `beneficiary` receives `amount`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NakedReceivable {
    pub beneficiary: BankId,
    pub reference_entity: BankId,
    pub amount: f64,
}

/// The single-layer effective exposure network `L^eff` plus the off-network
/// receivables created by naked contracts.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveExposureNetwork {
    pub exposures: Matrix,
    pub naked_receivables: Vec<NakedReceivable>,
}

impl EffectiveExposureNetwork {
    /// Wraps a bare exposure matrix with no receivables.
    pub fn from_matrix(exposures: Matrix) -> Self {
        EffectiveExposureNetwork {
            exposures,
            naked_receivables: Vec::new(),
        }
    }

    pub fn n_banks(&self) -> usize {
        self.exposures.dim()
    }

    pub fn total_volume(&self) -> f64 {
        self.exposures.sum()
    }
}

/// Collapses the loan layer and the CDS multiplex into effective exposures:
///
/// `L^eff_ij = max(0, L_ij - sum_z C^i_jz + sum_z' C^i_z'j)`
///
/// Protection bought by `j` on `i` removes exposure, protection sold by `j`
/// on `i` adds it.
pub fn effective_exposures(loans: &NetExposureMatrix, book: &CdsBook, ledger: &ExposureLedger) -> EffectiveExposureNetwork {
    let n = loans.dim();
    assert_eq!(n, book.n_banks(), "bank universes differ");
    let mut eff = Matrix::zeros(n);
    let mut bought = vec![0.0; n];
    let mut sold = vec![0.0; n];
    for i in 0..n {
        let layer = book.signed_layer(BankId(i));
        bought.iter_mut().for_each(|x| *x = 0.0);
        sold.iter_mut().for_each(|x| *x = 0.0);
        for a in 0..n {
            for z in 0..n {
                let c = layer.get(a, z);
                if c > 0.0 {
                    bought[a] += c;
                    sold[z] += c;
                }
            }
        }
        for j in 0..n {
            if j == i {
                continue;
            }
            let v = loans.get(i, j) - bought[j] + sold[j];
            if v > 0.0 {
                eff.set(i, j, v);
            }
        }
    }
    let naked_receivables = book
        .contracts()
        .filter(|c| !c.covered)
        .map(|c| NakedReceivable {
            beneficiary: c.buyer,
            reference_entity: c.reference_entity,
            amount: c.live_notional(ledger),
        })
        .filter(|r| r.amount > 0.0)
        .collect();
    EffectiveExposureNetwork {
        exposures: eff,
        naked_receivables,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exposure::{net_loans, CdsContract, ContractPolicy};

    fn b(i: usize) -> BankId {
        BankId(i)
    }

    #[test]
    fn no_cds_is_identity() {
        let mut ledger = ExposureLedger::new(3);
        ledger.extend(b(0), b(1), 3.0, 0.0).unwrap();
        ledger.extend(b(2), b(0), 2.5, 0.0).unwrap();
        let l = net_loans(&ledger);
        let book = CdsBook::new(3);
        let eff = effective_exposures(&l, &book, &ledger);
        assert_eq!(&eff.exposures, l.matrix());
        assert!(eff.naked_receivables.is_empty());
    }

    #[test]
    fn seller_to_a_buyer_that_already_sold_cancels() {
        // bank 0 bought from 2 on reference 1, then 2 buys the same from 0:
        // layer nets to zero and L^eff is back to L
        let mut ledger = ExposureLedger::new(3);
        let l0 = ledger.extend(b(1), b(0), 4.0, 0.0).unwrap();
        let l2 = ledger.extend(b(1), b(2), 4.0, 0.0).unwrap();
        let mut book = CdsBook::new(3);
        for (buyer, seller, loan) in [(0, 2, l0), (2, 0, l2)] {
            let id = book.next_id();
            book.register(
                CdsContract {
                    id,
                    buyer: b(buyer),
                    seller: b(seller),
                    reference_entity: b(1),
                    reference_loan: loan,
                    notional: 4.0,
                    spread: 0.0,
                    surcharge: 0.0,
                    maturity: 1,
                    covered: true,
                },
                &ledger,
                ContractPolicy::CoveredOnly,
            )
            .unwrap();
        }
        let l = net_loans(&ledger);
        let eff = effective_exposures(&l, &book, &ledger);
        assert_eq!(&eff.exposures, l.matrix());
    }
}
