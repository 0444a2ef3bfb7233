use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::ledger::{ExposureLedger, LoanId};
use crate::error::{Error, Result};
use crate::matrix::{BankId, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ContractId(pub u64);

impl fmt::Display for ContractId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C{}", self.0)
    }
}

/// Protection bought by `buyer` from `seller` against default of
/// `reference_entity` on `reference_loan`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdsContract {
    pub id: ContractId,
    pub buyer: BankId,
    pub seller: BankId,
    pub reference_entity: BankId,
    pub reference_loan: LoanId,
    /// Promised default payment, fixed at issuance.
    pub notional: f64,
    /// Bare spread `s_m` per step, paid to the seller.
    pub spread: f64,
    /// Systemic surcharge per step, paid to the guarantee fund.
    pub surcharge: f64,
    /// Maturity in steps.
    pub maturity: u32,
    /// The buyer is the lender on the reference loan.
    pub covered: bool,
}

impl CdsContract {
    /// Amount currently insured: the issuance notional, shrunk by repayments
    /// of the reference loan, zero once the loan is gone.
    pub fn live_notional(&self, ledger: &ExposureLedger) -> f64 {
        ledger
            .get(self.reference_loan)
            .map_or(0.0, |l| self.notional.min(l.outstanding))
    }

    pub fn effective_spread(&self) -> f64 {
        self.spread + self.surcharge
    }
}

/// Which contracts the market accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContractPolicy {
    AllowNaked,
    CoveredOnly,
}

/// All live CDS contracts plus the signed per-reference layers `C~^m`.
#[derive(Debug, Clone)]
pub struct CdsBook {
    n_banks: usize,
    contracts: BTreeMap<ContractId, CdsContract>,
    /// `signed[m]` is `C~^m`; antisymmetric by construction.
    signed: Vec<Matrix>,
    next_id: u64,
}

impl CdsBook {
    pub fn new(n_banks: usize) -> Self {
        CdsBook {
            n_banks,
            contracts: BTreeMap::new(),
            signed: (0..n_banks).map(|_| Matrix::zeros(n_banks)).collect(),
            next_id: 0,
        }
    }

    pub fn n_banks(&self) -> usize {
        self.n_banks
    }

    /// Reserves the next contract id.
    pub fn next_id(&mut self) -> ContractId {
        let id = ContractId(self.next_id);
        self.next_id += 1;
        id
    }

    pub fn contracts(&self) -> impl Iterator<Item = &CdsContract> {
        self.contracts.values()
    }

    pub fn get(&self, id: ContractId) -> Option<&CdsContract> {
        self.contracts.get(&id)
    }

    pub fn len(&self) -> usize {
        self.contracts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contracts.is_empty()
    }

    pub fn has_naked(&self) -> bool {
        self.contracts.values().any(|c| !c.covered)
    }

    /// Checks a contract against the ledger without booking it.
    pub fn validate(&self, c: &CdsContract, ledger: &ExposureLedger, policy: ContractPolicy) -> Result<()> {
        for b in [c.buyer, c.seller, c.reference_entity] {
            if b.0 >= self.n_banks {
                return Err(Error::UnknownBank(b, self.n_banks));
            }
        }
        if c.buyer == c.seller {
            return Err(Error::InvalidContract("buyer and seller coincide".into()));
        }
        if c.seller == c.reference_entity || c.buyer == c.reference_entity {
            return Err(Error::InvalidContract(
                "a bank cannot trade protection on itself".into(),
            ));
        }
        if !(c.notional > 0.0 && c.notional.is_finite()) {
            return Err(Error::InvalidContract(format!("notional must be positive, got {}", c.notional)));
        }
        if !(c.spread >= 0.0 && c.surcharge >= 0.0) {
            return Err(Error::InvalidContract("spread and surcharge must be non-negative".into()));
        }
        let loan = ledger.get(c.reference_loan).ok_or(Error::UnknownLoan(c.reference_loan))?;
        if loan.borrower != c.reference_entity {
            return Err(Error::InvalidContract(format!(
                "loan {} is owed by bank {}, not by reference entity {}",
                loan.id, loan.borrower, c.reference_entity
            )));
        }
        let holds_loan = loan.lender == c.buyer;
        if c.covered != holds_loan {
            return Err(Error::InvalidContract(format!(
                "covered flag is {} but buyer {} {} the reference loan",
                c.covered,
                c.buyer,
                if holds_loan { "holds" } else { "does not hold" }
            )));
        }
        if c.covered {
            let tol = 1e-9 * loan.outstanding.max(1.0);
            if (c.notional - loan.outstanding).abs() > tol {
                return Err(Error::InvalidContract(format!(
                    "covered notional {} differs from loan outstanding {}",
                    c.notional, loan.outstanding
                )));
            }
        } else if policy == ContractPolicy::CoveredOnly {
            return Err(Error::NakedForbidden);
        }
        if self.contracts.contains_key(&c.id) {
            return Err(Error::InvalidContract(format!("duplicate contract id {}", c.id)));
        }
        Ok(())
    }

    /// Books a contract and shifts layer `m` by its notional in both
    /// directions.
    pub fn register(&mut self, c: CdsContract, ledger: &ExposureLedger, policy: ContractPolicy) -> Result<ContractId> {
        self.validate(&c, ledger, policy)?;
        let amount = c.live_notional(ledger);
        let layer = &mut self.signed[c.reference_entity.0];
        layer.add(c.buyer.0, c.seller.0, amount);
        layer.add(c.seller.0, c.buyer.0, -amount);
        let id = c.id;
        self.next_id = self.next_id.max(id.0 + 1);
        self.contracts.insert(id, c);
        Ok(id)
    }

    pub fn remove(&mut self, id: ContractId, ledger: &ExposureLedger) -> Option<CdsContract> {
        let c = self.contracts.remove(&id)?;
        self.rebuild_layer(c.reference_entity.0, ledger);
        Some(c)
    }

    /// Removes every contract matching `pred` and rebuilds the layers.
    pub fn drain_where(
        &mut self,
        ledger: &ExposureLedger,
        mut pred: impl FnMut(&CdsContract) -> bool,
    ) -> Vec<CdsContract> {
        let ids: Vec<ContractId> = self.contracts.values().filter(|c| pred(c)).map(|c| c.id).collect();
        let out: Vec<CdsContract> = ids.into_iter().filter_map(|id| self.contracts.remove(&id)).collect();
        if !out.is_empty() {
            self.reconcile(ledger);
        }
        out
    }

    /// Terminates contracts whose reference loan is gone and recomputes
    /// every layer from the live notionals.
    pub fn reconcile(&mut self, ledger: &ExposureLedger) -> Vec<CdsContract> {
        let dead: Vec<ContractId> = self
            .contracts
            .values()
            .filter(|c| ledger.get(c.reference_loan).is_none())
            .map(|c| c.id)
            .collect();
        let removed = dead.into_iter().filter_map(|id| self.contracts.remove(&id)).collect();
        for m in 0..self.n_banks {
            self.rebuild_layer(m, ledger);
        }
        removed
    }

    fn rebuild_layer(&mut self, m: usize, ledger: &ExposureLedger) {
        let mut layer = Matrix::zeros(self.n_banks);
        for c in self.contracts.values().filter(|c| c.reference_entity.0 == m) {
            let amount = c.live_notional(ledger);
            layer.add(c.buyer.0, c.seller.0, amount);
            layer.add(c.seller.0, c.buyer.0, -amount);
        }
        self.signed[m] = layer;
    }

    /// Signed layer `C~^m`.
    pub fn signed_layer(&self, m: BankId) -> &Matrix {
        &self.signed[m.0]
    }

    /// Net layer `C^m = max(0, C~^m)`: entry `(i, j)` is what `j` pays `i`
    /// when `m` defaults.
    pub fn net_layer(&self, m: BankId) -> Matrix {
        self.signed[m.0].positive_part()
    }

    pub fn net_layers(&self) -> Vec<Matrix> {
        self.signed.iter().map(Matrix::positive_part).collect()
    }

    /// Total live notional.
    pub fn volume(&self, ledger: &ExposureLedger) -> f64 {
        self.contracts.values().map(|c| c.live_notional(ledger)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(i: usize) -> BankId {
        BankId(i)
    }

    fn contract(book: &mut CdsBook, buyer: usize, seller: usize, m: usize, loan: LoanId, notional: f64, covered: bool) -> CdsContract {
        CdsContract {
            id: book.next_id(),
            buyer: b(buyer),
            seller: b(seller),
            reference_entity: b(m),
            reference_loan: loan,
            notional,
            spread: 0.01,
            surcharge: 0.0,
            maturity: 5,
            covered,
        }
    }

    // Banks are 1-based in the comments, 0-based in code.

    #[test]
    fn first_contract_opens_layer() {
        let mut ledger = ExposureLedger::new(4);
        let loan = ledger.extend(b(1), b(0), 10.0, 0.0).unwrap();
        let mut book = CdsBook::new(4);
        let c = contract(&mut book, 0, 2, 1, loan, 10.0, true);
        book.register(c, &ledger, ContractPolicy::CoveredOnly).unwrap();
        let c2 = book.net_layer(b(1));
        assert_eq!(c2.get(0, 2), 10.0);
        assert_eq!(c2.sum(), 10.0);
    }

    #[test]
    fn offsetting_contracts_net_out() {
        let mut ledger = ExposureLedger::new(4);
        let l1 = ledger.extend(b(1), b(0), 10.0, 0.0).unwrap();
        let l3 = ledger.extend(b(1), b(2), 10.0, 0.0).unwrap();
        let mut book = CdsBook::new(4);
        let c = contract(&mut book, 0, 2, 1, l1, 10.0, true);
        book.register(c, &ledger, ContractPolicy::CoveredOnly).unwrap();
        let c = contract(&mut book, 2, 0, 1, l3, 10.0, true);
        book.register(c, &ledger, ContractPolicy::CoveredOnly).unwrap();
        assert_eq!(book.net_layer(b(1)), Matrix::zeros(4));
        assert_eq!(book.len(), 2);
    }

    #[test]
    fn layer_is_signed_sum() {
        let mut ledger = ExposureLedger::new(4);
        let l1 = ledger.extend(b(1), b(0), 4.0, 0.0).unwrap();
        let l2 = ledger.extend(b(1), b(0), 3.0, 0.0).unwrap();
        let mut book = CdsBook::new(4);
        let c = contract(&mut book, 0, 2, 1, l1, 4.0, true);
        book.register(c, &ledger, ContractPolicy::CoveredOnly).unwrap();
        let c = contract(&mut book, 0, 2, 1, l2, 3.0, true);
        book.register(c, &ledger, ContractPolicy::CoveredOnly).unwrap();
        let oracle: f64 = [4.0, 3.0].iter().sum();
        assert_eq!(book.net_layer(b(1)).get(0, 2), oracle);
        assert_eq!(book.net_layer(b(1)).get(2, 0), 0.0);
    }

    #[test]
    fn rejects_unknown_loan_and_naked_when_regulated() {
        let mut ledger = ExposureLedger::new(4);
        let loan = ledger.extend(b(2), b(3), 5.0, 0.0).unwrap();
        let mut book = CdsBook::new(4);
        let mut c = contract(&mut book, 0, 1, 2, loan, 5.0, false);
        assert!(matches!(
            book.register(c.clone(), &ledger, ContractPolicy::CoveredOnly),
            Err(Error::NakedForbidden)
        ));
        c.reference_loan = LoanId(99);
        assert!(matches!(
            book.register(c, &ledger, ContractPolicy::AllowNaked),
            Err(Error::UnknownLoan(_))
        ));
        assert!(book.is_empty());
    }

    #[test]
    fn rejects_inconsistent_parties() {
        let mut ledger = ExposureLedger::new(4);
        let loan = ledger.extend(b(2), b(3), 5.0, 0.0).unwrap();
        let mut book = CdsBook::new(4);
        // mislabelled as covered
        let c = contract(&mut book, 0, 1, 2, loan, 5.0, true);
        assert!(book.register(c, &ledger, ContractPolicy::AllowNaked).is_err());
        // seller is the reference entity
        let c = contract(&mut book, 3, 2, 2, loan, 5.0, true);
        assert!(book.register(c, &ledger, ContractPolicy::AllowNaked).is_err());
        // covered notional must match the loan
        let c = contract(&mut book, 3, 1, 2, loan, 4.0, true);
        assert!(book.register(c, &ledger, ContractPolicy::AllowNaked).is_err());
    }

    #[test]
    fn repayment_shrinks_and_maturity_removes() {
        let mut ledger = ExposureLedger::new(3);
        let loan = ledger.extend(b(1), b(0), 10.0, 0.0).unwrap();
        let mut book = CdsBook::new(3);
        let c = contract(&mut book, 0, 2, 1, loan, 10.0, true);
        book.register(c, &ledger, ContractPolicy::CoveredOnly).unwrap();
        ledger.get_mut(loan).unwrap().outstanding = 6.0;
        book.reconcile(&ledger);
        assert_eq!(book.net_layer(b(1)).get(0, 2), 6.0);
        ledger.remove(loan);
        let gone = book.reconcile(&ledger);
        assert_eq!(gone.len(), 1);
        assert!(book.is_empty());
        assert_eq!(book.net_layer(b(1)), Matrix::zeros(3));
    }
}
