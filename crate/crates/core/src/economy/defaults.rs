//! Firm bankruptcy and interbank insolvency cascades.

use super::params::Regime;
use super::report::CascadeResult;
use super::state::{EconomyState, Party};
use crate::matrix::BankId;

impl EconomyState {
    /// Resolves every firm flagged insolvent by debt service: creditors
    /// recover the firm's liquidity and then the owner's account, pro rata
    /// to their outstanding loans, and write off the rest. The owner
    /// restarts the firm with the population-average price and expected
    /// demand.
    pub fn firm_bankruptcies(&mut self) {
        let n = self.firms.len() as f64;
        let avg_demand = self.firms.iter().map(|f| f.expected_demand).sum::<f64>() / n;
        let avg_price = self.firms.iter().map(|f| f.price).sum::<f64>() / n;
        for f in 0..self.firms.len() {
            if self.firms[f].insolvent {
                self.firm_bankruptcy(f, avg_demand, avg_price);
            }
        }
    }

    pub fn firm_bankruptcy(&mut self, f: usize, avg_demand: f64, avg_price: f64) {
        let owner = self.firms[f].owner;
        let loans: Vec<(BankId, f64)> = self
            .firm_loans
            .iter()
            .filter(|l| l.firm == f)
            .map(|l| (l.bank, l.outstanding))
            .collect();
        let owed: f64 = loans.iter().map(|l| l.1).sum();
        if owed > 0.0 {
            let from_firm = self.firms[f].liquidity.max(0.0).min(owed);
            let from_owner = self.households[owner].account.max(0.0).min(owed - from_firm);
            for &(bank, outstanding) in &loans {
                let share = outstanding / owed;
                self.transfer(Party::Firm(f), Party::Bank(bank), from_firm * share);
                self.transfer(Party::Household(owner), Party::Bank(bank), from_owner * share);
            }
        }
        self.firm_loans.retain(|l| l.firm != f);
        let firm = &mut self.firms[f];
        firm.expected_demand = avg_demand;
        firm.price = avg_price;
        firm.insolvent = false;
        firm.revenue = 0.0;
        firm.wage_bill = 0.0;
        firm.interest_paid = 0.0;
        firm.bankruptcies += 1;
    }

    /// Runs an insolvency cascade from `triggers` in synchronous rounds.
    ///
    /// Each round fails the current frontier, writes off every interbank
    /// loan it owes (no recovery), pays protection written on it (seller
    /// first, up to its remaining equity; the guarantee fund covers the
    /// rest in the regulated regime), and collects the banks pushed to
    /// non-positive equity as the next frontier. Contracts bought by failed
    /// banks are terminated.
    pub fn resolve_defaults(&mut self, triggers: &[BankId], exogenous: bool) -> CascadeResult {
        let before = self.equities();
        let mut equity = before.clone();
        let capital: f64 = before.iter().map(|e| e.max(0.0)).sum();
        let guaranteed = self.regime == Regime::RegulatedCovered;
        let mut result = CascadeResult {
            step: self.step,
            triggers: Vec::new(),
            defaulted: Vec::new(),
            rounds: 0,
            loss: 0.0,
            capital,
            written_off: 0.0,
            protection_paid: 0.0,
            fund_paid: 0.0,
            protection_unpaid: 0.0,
            exogenous,
        };

        let mut frontier: Vec<BankId> = triggers.to_vec();
        frontier.sort();
        frontier.dedup();
        frontier.retain(|b| !self.banks[b.0].failed);
        result.triggers = frontier.clone();

        while !frontier.is_empty() {
            result.rounds += 1;
            for b in &frontier {
                self.banks[b.0].failed = true;
                result.defaulted.push(*b);
            }
            let in_frontier = |b: BankId| frontier.contains(&b);

            let claims: Vec<(BankId, BankId, f64)> = self
                .book
                .contracts()
                .filter(|c| in_frontier(c.reference_entity) && !self.banks[c.buyer.0].failed)
                .map(|c| (c.buyer, c.seller, c.live_notional(&self.ledger)))
                .collect();

            for loan in self.ledger.drain_where(|l| in_frontier(l.borrower)) {
                equity[loan.lender.0] -= loan.outstanding;
                result.written_off += loan.outstanding;
            }

            for (buyer, seller, notional) in claims {
                let capacity = if self.banks[seller.0].failed { 0.0 } else { equity[seller.0].max(0.0) };
                let paid = notional.min(capacity);
                self.transfer(Party::Bank(seller), Party::Bank(buyer), paid);
                equity[seller.0] -= paid;
                equity[buyer.0] += paid;
                result.protection_paid += paid;
                let rest = notional - paid;
                if rest > 0.0 {
                    if guaranteed {
                        self.transfer(Party::Fund, Party::Bank(buyer), rest);
                        self.fund.payouts += rest;
                        equity[buyer.0] += rest;
                        result.fund_paid += rest;
                    } else {
                        result.protection_unpaid += rest;
                    }
                }
            }

            let failed: Vec<bool> = self.banks.iter().map(|b| b.failed).collect();
            self.book
                .drain_where(&self.ledger, |c| failed[c.reference_entity.0] || failed[c.buyer.0]);

            frontier = (0..self.banks.len())
                .filter(|&b| !self.banks[b].failed && equity[b] <= 0.0)
                .map(BankId)
                .collect();
        }

        result.loss = (0..self.banks.len())
            .filter(|b| !result.triggers.contains(&BankId(*b)))
            .map(|b| (before[b] - equity[b]).max(0.0).min(before[b].max(0.0)))
            .sum();
        result
    }
}
