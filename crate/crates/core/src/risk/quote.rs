//! Marginal expected systemic loss of a candidate contract, and the
//! regulator's quoting of every eligible seller.

use super::debtrank::{expected_loss_with, BankCapital, ImpactMatrix, Scratch};
use super::surcharge::{effective_spread, DefaultModel, SurchargeQuote};
use crate::error::Result;
use crate::exposure::{
    effective_exposures, net_loans, CdsBook, CdsContract, ContractPolicy, EffectiveExposureNetwork, ExposureLedger,
    LoanId, NetExposureMatrix,
};
use crate::matrix::{BankId, Matrix};

/// Snapshot of everything the risk metrics read.
#[derive(Debug, Clone, Copy)]
pub struct RiskInputs<'a> {
    pub ledger: &'a ExposureLedger,
    pub book: &'a CdsBook,
    pub equity: &'a [f64],
    pub solvent: &'a [bool],
}

impl<'a> RiskInputs<'a> {
    pub fn effective_network(&self) -> EffectiveExposureNetwork {
        effective_exposures(&net_loans(self.ledger), self.book, self.ledger)
    }

    pub fn capital(&self, exposures: &Matrix) -> Result<BankCapital> {
        Ok(BankCapital::from_network(self.equity, exposures)?.with_solvency(self.solvent.to_vec()))
    }

    pub fn expected_loss(&self, model: &DefaultModel) -> Result<f64> {
        let net = self.effective_network();
        let cap = self.capital(&net.exposures)?;
        super::debtrank::expected_systemic_loss(&net.exposures, &cap, model.p_def())
    }

    /// `EL(L^eff[+C], E) - EL(L^eff, E)`, rebuilding the book with the
    /// candidate and recomputing the effective network and economic values
    /// from scratch. Equity is unchanged at quote time.
    pub fn marginal_expected_loss(
        &self,
        candidate: &CdsContract,
        model: &DefaultModel,
        policy: ContractPolicy,
    ) -> Result<f64> {
        let before = self.expected_loss(model)?;
        let mut book = self.book.clone();
        book.register(candidate.clone(), self.ledger, policy)?;
        let with = RiskInputs { book: &book, ..*self };
        Ok(with.expected_loss(model)? - before)
    }
}

/// Fast quoting against one fixed snapshot.
///
/// A contract on reference `m` between buyer `b` and seller `s` only moves
/// the entries `(m, b)` and `(m, s)` of `L^eff`, so each quote patches two
/// impacts and the value weights instead of rebuilding the network.
pub struct QuoteEngine<'a> {
    inputs: RiskInputs<'a>,
    loans: NetExposureMatrix,
    exposures: Matrix,
    impact: ImpactMatrix,
    inv_equity: Vec<f64>,
    assets: Vec<f64>,
    total: f64,
    base_el: f64,
    model: &'a DefaultModel,
    scratch: Scratch,
    weights: Vec<f64>,
}

impl<'a> QuoteEngine<'a> {
    pub fn new(inputs: RiskInputs<'a>, model: &'a DefaultModel) -> Result<Self> {
        let loans = net_loans(inputs.ledger);
        let net = effective_exposures(&loans, inputs.book, inputs.ledger);
        let cap = inputs.capital(&net.exposures)?;
        let impact = ImpactMatrix::new(&net.exposures, &cap)?;
        let mut scratch = Scratch::default();
        let base_el = expected_loss_with(&impact, cap.weights(), cap.total_value(), model.p_def(), &mut scratch);
        let n = loans.dim();
        let inv_equity = (0..n)
            .map(|j| if inputs.solvent[j] { 1.0 / inputs.equity[j] } else { 0.0 })
            .collect();
        let assets = (0..n).map(|j| net.exposures.col_sum(j)).collect();
        Ok(QuoteEngine {
            inputs,
            loans,
            total: net.exposures.sum(),
            exposures: net.exposures,
            impact,
            inv_equity,
            assets,
            base_el,
            model,
            scratch,
            weights: vec![0.0; n],
        })
    }

    pub fn base_expected_loss(&self) -> f64 {
        self.base_el
    }

    /// Patched effective entry `(m, j)` for `j` in `{buyer, seller}` after
    /// adding `amount` to the signed layer at `(buyer, seller)`.
    fn patched_entry(&self, m: usize, j: usize, buyer: usize, seller: usize, amount: f64) -> f64 {
        let layer = self.inputs.book.signed_layer(BankId(m));
        let n = layer.dim();
        let shifted = |a: usize, z: usize| {
            let mut x = layer.get(a, z);
            if a == buyer && z == seller {
                x += amount;
            } else if a == seller && z == buyer {
                x -= amount;
            }
            x.max(0.0)
        };
        let bought: f64 = (0..n).map(|z| shifted(j, z)).sum();
        let sold: f64 = (0..n).map(|z| shifted(z, j)).sum();
        (self.loans.get(m, j) - bought + sold).max(0.0)
    }

    /// Marginal expected systemic loss of `buyer` buying `amount` of
    /// protection on `reference` from `seller`.
    pub fn delta_el(&mut self, buyer: BankId, seller: BankId, reference: BankId, amount: f64) -> f64 {
        let (m, b, s) = (reference.0, buyer.0, seller.0);
        let new_b = self.patched_entry(m, b, b, s, amount);
        let new_s = self.patched_entry(m, s, b, s, amount);
        let old_b = self.exposures.get(m, b);
        let old_s = self.exposures.get(m, s);
        let total = self.total - old_b - old_s + new_b + new_s;
        if total <= 0.0 {
            return -self.base_el;
        }
        for (j, w) in self.weights.iter_mut().enumerate() {
            let a = if j == b {
                self.assets[j] - old_b + new_b
            } else if j == s {
                self.assets[j] - old_s + new_s
            } else {
                self.assets[j]
            };
            *w = a / total;
        }
        let (wb, ws) = (self.impact.get(m, b), self.impact.get(m, s));
        self.impact.set(m, b, (new_b * self.inv_equity[b]).min(1.0));
        self.impact.set(m, s, (new_s * self.inv_equity[s]).min(1.0));
        let el = expected_loss_with(&self.impact, &self.weights, total, self.model.p_def(), &mut self.scratch);
        self.impact.set(m, b, wb);
        self.impact.set(m, s, ws);
        el - self.base_el
    }

    /// Quotes every seller in `sellers` for protection on `loan` bought by
    /// `buyer`.
    pub fn quote_all(
        &mut self,
        buyer: BankId,
        loan: LoanId,
        reference: BankId,
        amount: f64,
        sellers: &[BankId],
        zeta: f64,
    ) -> Vec<SurchargeQuote> {
        let s_m = self.model.spread(reference);
        sellers
            .iter()
            .map(|&seller| {
                let delta_el = self.delta_el(buyer, seller, reference, amount);
                let tau = self.model.surcharge(delta_el, zeta);
                SurchargeQuote {
                    buyer,
                    seller,
                    reference_entity: reference,
                    reference_loan: loan,
                    delta_el,
                    tau,
                    effective_spread: effective_spread(s_m, tau),
                }
            })
            .collect()
    }
}
