//! Protection on fresh interbank loans, and speculative naked demand.

use rand::seq::SliceRandom;
use rand::Rng;

use super::params::Regime;
use super::state::EconomyState;
use crate::exposure::{CdsContract, LoanId};
use crate::matrix::BankId;
use crate::risk::{select_counterparty, QuoteEngine, RiskInputs};

impl EconomyState {
    /// Lenders of fresh interbank loans insure them. Unregulated buyers are
    /// indifferent between sellers and pick one at random; regulated buyers
    /// take the cheapest effective spread quoted by the regulator. In the
    /// unregulated market each bank with free reserves may also buy one
    /// naked contract per step.
    pub fn cds_market(&mut self, fresh: &[LoanId]) {
        if !self.regime.has_cds() {
            return;
        }
        let equity = self.equities();
        let solvent: Vec<bool> = self.banks.iter().zip(&equity).map(|(b, &e)| !b.failed && e > 0.0).collect();
        for &id in fresh {
            let wants = self.rng.cds.gen::<f64>() < self.params.cds_demand;
            let Some(loan) = self.ledger.get(id).cloned() else { continue };
            if !wants {
                continue;
            }
            let sellers: Vec<BankId> = (0..self.banks.len())
                .map(BankId)
                .filter(|&s| s != loan.lender && s != loan.borrower && solvent[s.0])
                .collect();
            let chosen = match self.regime {
                Regime::RegulatedCovered => self.regulated_choice(&equity, &solvent, &loan, &sellers),
                _ => sellers.choose(&mut self.rng.cds).map(|&s| (s, 0.0)),
            };
            let Some((seller, surcharge)) = chosen else { continue };
            let contract = CdsContract {
                id: self.book.next_id(),
                buyer: loan.lender,
                seller,
                reference_entity: loan.borrower,
                reference_loan: id,
                notional: loan.outstanding,
                spread: self.model.spread(loan.borrower),
                surcharge,
                maturity: self.params.loan_term(),
                covered: true,
            };
            // a contract that fails validation is simply not formed
            let _ = self.book.register(contract, &self.ledger, self.regime.policy());
        }
        if self.regime == Regime::UnregulatedNaked {
            self.naked_demand(&solvent);
        }
    }

    fn regulated_choice(
        &mut self,
        equity: &[f64],
        solvent: &[bool],
        loan: &crate::exposure::Loan,
        sellers: &[BankId],
    ) -> Option<(BankId, f64)> {
        if sellers.is_empty() {
            return None;
        }
        let inputs = RiskInputs {
            ledger: &self.ledger,
            book: &self.book,
            equity,
            solvent,
        };
        let mut engine = QuoteEngine::new(inputs, &self.model).ok()?;
        let quotes = engine.quote_all(loan.lender, loan.id, loan.borrower, loan.outstanding, sellers, self.zeta);
        let best = select_counterparty(&quotes)?.clone();
        if self.params.log_quotes {
            self.quote_log.extend(quotes.into_iter().map(|q| (self.step, q)));
        }
        Some((best.seller, best.tau))
    }

    fn naked_demand(&mut self, solvent: &[bool]) {
        let rho = self.params.reserve_ratio;
        for b in 0..self.banks.len() {
            let wants = self.rng.cds.gen::<f64>() < self.params.naked_demand;
            if !wants || !solvent[b] || self.banks[b].free_reserves(rho) <= 0.0 {
                continue;
            }
            let buyer = BankId(b);
            let targets: Vec<LoanId> = self
                .ledger
                .loans()
                .filter(|l| l.lender != buyer && l.borrower != buyer)
                .map(|l| l.id)
                .collect();
            let Some(&id) = targets.choose(&mut self.rng.cds) else { continue };
            let loan = self.ledger.get(id).expect("listed loan").clone();
            let sellers: Vec<BankId> = (0..self.banks.len())
                .map(BankId)
                .filter(|&s| s != buyer && s != loan.borrower && solvent[s.0])
                .collect();
            let Some(&seller) = sellers.choose(&mut self.rng.cds) else { continue };
            let contract = CdsContract {
                id: self.book.next_id(),
                buyer,
                seller,
                reference_entity: loan.borrower,
                reference_loan: id,
                notional: loan.outstanding,
                spread: self.model.spread(loan.borrower),
                surcharge: 0.0,
                maturity: self.params.loan_term(),
                covered: false,
            };
            let _ = self.book.register(contract, &self.ledger, self.regime.policy());
        }
    }
}
