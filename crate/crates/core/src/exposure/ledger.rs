use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{BankId, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LoanId(pub u64);

impl fmt::Display for LoanId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L{}", self.0)
    }
}

/// A gross interbank loan `l^k_ij`: `lender` has lent to `borrower`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Loan {
    pub id: LoanId,
    pub borrower: BankId,
    pub lender: BankId,
    pub face_value: f64,
    /// Interest per step on the outstanding principal.
    pub rate: f64,
    pub outstanding: f64,
}

/// Gross directed interbank loans, keyed by id in issuance order.
#[derive(Debug, Clone, Default)]
pub struct ExposureLedger {
    n_banks: usize,
    loans: BTreeMap<LoanId, Loan>,
    next_id: u64,
}

impl ExposureLedger {
    pub fn new(n_banks: usize) -> Self {
        ExposureLedger {
            n_banks,
            loans: BTreeMap::new(),
            next_id: 0,
        }
    }

    pub fn n_banks(&self) -> usize {
        self.n_banks
    }

    /// Books a new loan with `outstanding = face_value`.
    pub fn extend(&mut self, borrower: BankId, lender: BankId, face_value: f64, rate: f64) -> Result<LoanId> {
        self.check_bank(borrower)?;
        self.check_bank(lender)?;
        if borrower == lender {
            return Err(Error::InvalidLoan(format!("bank {borrower} cannot lend to itself")));
        }
        if !(face_value > 0.0 && face_value.is_finite()) {
            return Err(Error::InvalidLoan(format!("face value must be positive, got {face_value}")));
        }
        if !(rate >= 0.0 && rate.is_finite()) {
            return Err(Error::InvalidLoan(format!("rate must be non-negative, got {rate}")));
        }
        let id = LoanId(self.next_id);
        self.next_id += 1;
        self.loans.insert(
            id,
            Loan {
                id,
                borrower,
                lender,
                face_value,
                rate,
                outstanding: face_value,
            },
        );
        Ok(id)
    }

    fn check_bank(&self, b: BankId) -> Result<()> {
        if b.0 < self.n_banks {
            Ok(())
        } else {
            Err(Error::UnknownBank(b, self.n_banks))
        }
    }

    pub fn get(&self, id: LoanId) -> Option<&Loan> {
        self.loans.get(&id)
    }

    pub fn get_mut(&mut self, id: LoanId) -> Option<&mut Loan> {
        self.loans.get_mut(&id)
    }

    pub fn remove(&mut self, id: LoanId) -> Option<Loan> {
        self.loans.remove(&id)
    }

    pub fn loans(&self) -> impl Iterator<Item = &Loan> {
        self.loans.values()
    }

    pub fn loans_mut(&mut self) -> impl Iterator<Item = &mut Loan> {
        self.loans.values_mut()
    }

    pub fn ids(&self) -> Vec<LoanId> {
        self.loans.keys().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.loans.len()
    }

    pub fn is_empty(&self) -> bool {
        self.loans.is_empty()
    }

    pub fn total_outstanding(&self) -> f64 {
        self.loans.values().map(|l| l.outstanding).sum()
    }

    /// Drops every loan matching `pred` and returns them.
    pub fn drain_where(&mut self, mut pred: impl FnMut(&Loan) -> bool) -> Vec<Loan> {
        let ids: Vec<LoanId> = self.loans.values().filter(|l| pred(l)).map(|l| l.id).collect();
        ids.into_iter().filter_map(|id| self.loans.remove(&id)).collect()
    }

    /// Signed gross matrix `L~`: entry `(i, j)` is what `i` owes `j` minus
    /// what `j` owes `i`.
    pub fn signed_exposures(&self) -> Matrix {
        let mut m = Matrix::zeros(self.n_banks);
        for l in self.loans.values() {
            let (i, j) = (l.borrower.0, l.lender.0);
            m.add(i, j, l.outstanding);
            m.add(j, i, -l.outstanding);
        }
        m
    }
}

/// Net loan exposures `L = max(0, L~)`; `L_ij` is the net exposure of
/// lender `j` to borrower `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct NetExposureMatrix(Matrix);

impl NetExposureMatrix {
    pub fn from_matrix(m: Matrix) -> Self {
        NetExposureMatrix(m)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn get(&self, borrower: usize, lender: usize) -> f64 {
        self.0.get(borrower, lender)
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }
}

/// Bilateral netting of every loan between each pair of banks.
pub fn net_loans(ledger: &ExposureLedger) -> NetExposureMatrix {
    let signed = ledger.signed_exposures();
    let n = signed.dim();
    let mut net = Matrix::zeros(n);
    // Read each pair once so the two directions come from the same float and
    // at most one of them survives truncation.
    for i in 0..n {
        for j in i + 1..n {
            let x = signed.get(i, j);
            if x > 0.0 {
                net.set(i, j, x);
            } else if x < 0.0 {
                net.set(j, i, -x);
            }
        }
    }
    NetExposureMatrix(net)
}
