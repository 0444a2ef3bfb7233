use crate::matrix::BankId;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HouseholdKind {
    Worker,
    /// Owns the firm with this index and lives on its dividends.
    Owner(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Household {
    pub kind: HouseholdKind,
    /// Deposit held at `bank`.
    pub account: f64,
    pub bank: BankId,
    pub employer: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Firm {
    pub owner: usize,
    /// Bank holding the firm's deposit.
    pub bank: BankId,
    pub liquidity: f64,
    pub expected_demand: f64,
    pub price: f64,
    pub workers: Vec<usize>,
    /// Units produced this step.
    pub output: f64,
    /// Units sold this step.
    pub sold: f64,
    pub revenue: f64,
    pub wage_bill: f64,
    pub interest_paid: f64,
    /// Set when debt service could not be met.
    pub insolvent: bool,
    pub bankruptcies: u32,
}

impl Firm {
    pub fn excess_demand(&self) -> bool {
        self.output > 0.0 && self.sold >= self.output - 1e-12
    }

    pub fn profit(&self) -> f64 {
        self.revenue - self.wage_bill - self.interest_paid
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bank {
    /// Reserves.
    pub cash: f64,
    /// Deposits of households and firms assigned to this bank.
    pub deposits: f64,
    /// Firm-loan rate add-on, redrawn every step.
    pub specificity: f64,
    /// Interbank offer add-on, redrawn every step.
    pub interbank_specificity: f64,
    /// Equity level above which dividends are paid.
    pub equity_target: f64,
    pub failed: bool,
}

impl Bank {
    /// Reserves above the required fraction of deposits.
    pub fn free_reserves(&self, reserve_ratio: f64) -> f64 {
        self.cash - reserve_ratio * self.deposits.max(0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FirmLoan {
    pub firm: usize,
    pub bank: BankId,
    pub face_value: f64,
    pub rate: f64,
    pub outstanding: f64,
}

/// Regulator's account: surcharges and taxes in, guaranteed CDS payouts out.
///
/// The fund always pays; a negative balance is the regulator's cost.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GuaranteeFund {
    pub balance: f64,
    pub surcharges: f64,
    pub taxes: f64,
    pub payouts: f64,
}
