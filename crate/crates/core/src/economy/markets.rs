//! The step schedule and the credit, interbank, job and goods markets.

use rand::seq::{index, SliceRandom};
use rand::Rng;

use super::agents::FirmLoan;
use super::report::{mean, NetworkSnapshot, StepReport};
use super::state::{EconomyState, Party};
use crate::exposure::{weighted_clustering, weighted_in_degree, LoanId};
use crate::matrix::BankId;
use crate::risk::{debtrank_profile, BankCapital};

/// A firm-loan request the chosen bank could not pay out from its own
/// free reserves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CreditRequest {
    pub firm: usize,
    pub bank: BankId,
    pub amount: f64,
    pub rate: f64,
}

impl EconomyState {
    /// Advances the economy by one step. Once a cascade has been resolved
    /// the run is over and further calls return an empty report.
    pub fn step(&mut self) -> StepReport {
        if self.halted {
            return StepReport {
                step: self.step,
                defaults: 0,
                cascade_loss: 0.0,
                interbank_volume: self.ledger.total_outstanding(),
                cds_volume: self.book.volume(&self.ledger),
                fund_balance: self.fund.balance,
                mean_debtrank: 0.0,
            };
        }
        self.step += 1;
        self.draw_specificities();
        self.plan_firms();
        let pending = self.credit_market();
        let fresh = self.interbank_loan_market(pending);
        self.cds_market(&fresh);
        self.job_market();
        self.goods_market();
        self.repayments();
        self.firm_bankruptcies();
        self.pay_dividends();
        let defaults = self.bank_defaults();

        let mean_debtrank = match &self.snapshot {
            Some(s) => s.mean_debtrank(),
            None => mean(&self.debtrank_now(&self.equities())),
        };
        StepReport {
            step: self.step,
            defaults,
            cascade_loss: self.cascade.as_ref().map_or(0.0, |c| c.loss),
            interbank_volume: self.ledger.total_outstanding(),
            cds_volume: self.book.volume(&self.ledger),
            fund_balance: self.fund.balance,
            mean_debtrank,
        }
    }

    fn draw_specificities(&mut self) {
        let (max_firm, max_ib) = (self.params.bank_specificity, self.params.interbank_specificity);
        for b in &mut self.banks {
            b.specificity = max_firm * self.rng.credit.gen::<f64>();
            b.interbank_specificity = max_ib * self.rng.interbank.gen::<f64>();
        }
    }

    /// Workers a firm wants for its expected demand.
    pub(crate) fn desired_workers(&self, f: usize) -> usize {
        let units = self.firms[f].expected_demand / self.params.productivity;
        (units - 1e-9).ceil().max(1.0) as usize
    }

    /// Price and quantity rule: a firm that sold out plans more than last
    /// step's output if it is already priced above average, otherwise it
    /// raises its price; a firm left with unsold output cuts its price if
    /// above average, otherwise plans less than it produced.
    pub fn plan_firms(&mut self) {
        let avg_price = mean(&self.firms.iter().map(|f| f.price).collect::<Vec<_>>());
        let floor = self.params.productivity;
        for firm in &mut self.firms {
            let u = self.params.adjustment * self.rng.planning.gen::<f64>();
            if firm.output <= 0.0 {
                continue;
            }
            if firm.excess_demand() {
                if firm.price >= avg_price {
                    firm.expected_demand = firm.output * (1.0 + u);
                } else {
                    firm.price *= 1.0 + u;
                }
            } else if firm.price > avg_price {
                firm.price *= 1.0 - u;
            } else {
                firm.expected_demand = (firm.output * (1.0 - u)).max(floor);
            }
        }
    }

    /// Interest rate bank `b` offers firm `f`.
    pub fn firm_rate(&self, b: BankId, f: usize, firm_debt: f64) -> f64 {
        let p = &self.params;
        let fragility = firm_debt / (self.firms[f].liquidity.max(0.0) + p.fragility_epsilon);
        p.firm_base_rate + self.banks[b.0].specificity + p.fragility_premium * fragility
    }

    fn firm_debts(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.firms.len()];
        for l in &self.firm_loans {
            d[l.firm] += l.outstanding;
        }
        d
    }

    /// Firms short of their wage bill ask `n` random banks and take the
    /// cheapest offer, scaling the request by `phi` when even that exceeds
    /// `r_max`. Requests the bank can fund from free reserves are paid out
    /// at once; the rest are returned for the interbank market.
    pub fn credit_market(&mut self) -> Vec<CreditRequest> {
        let debts = self.firm_debts();
        let live: Vec<usize> = (0..self.banks.len()).filter(|&b| !self.banks[b].failed).collect();
        let mut order: Vec<usize> = (0..self.firms.len()).collect();
        order.shuffle(&mut self.rng.credit);
        let mut pending = Vec::new();
        for f in order {
            let need = self.params.wage * self.desired_workers(f) as f64 - self.firms[f].liquidity;
            if need <= 0.0 || live.is_empty() {
                continue;
            }
            let k = self.params.bank_search.min(live.len());
            let asked = index::sample(&mut self.rng.credit, live.len(), k);
            let (bank, rate) = asked
                .iter()
                .map(|i| {
                    let b = BankId(live[i]);
                    (b, self.firm_rate(b, f, debts[f]))
                })
                .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
                .expect("at least one bank asked");
            let amount = if rate > self.params.rate_ceiling {
                self.params.reduced_ask * need
            } else {
                need
            };
            let request = CreditRequest { firm: f, bank, amount, rate };
            if self.banks[bank.0].free_reserves(self.params.reserve_ratio) >= amount {
                self.grant(request);
            } else {
                pending.push(request);
            }
        }
        pending
    }

    fn grant(&mut self, r: CreditRequest) {
        self.transfer(Party::Bank(r.bank), Party::Firm(r.firm), r.amount);
        self.firm_loans.push(FirmLoan {
            firm: r.firm,
            bank: r.bank,
            face_value: r.amount,
            rate: r.rate,
            outstanding: r.amount,
        });
    }

    /// Rate `lender` offers a borrower with the given equity and interbank
    /// liabilities, tax included.
    pub fn interbank_rate(&self, lender: BankId, borrower_equity: f64, borrower_liabilities: f64) -> f64 {
        let p = &self.params;
        let leverage = borrower_liabilities / borrower_equity.max(p.fragility_epsilon);
        p.interbank_base_rate + self.banks[lender.0].interbank_specificity + p.interbank_premium * leverage + self.interbank_tax
    }

    /// Banks short of reserves for pending firm loans borrow the shortfall
    /// from the cheapest lender whose free reserves cover it. A bank that
    /// finds no such lender does not pay the loan out. Refinancing cost
    /// is passed on to the firm's rate. Returns the new interbank loans.
    pub fn interbank_loan_market(&mut self, pending: Vec<CreditRequest>) -> Vec<LoanId> {
        let mut fresh = Vec::new();
        if pending.is_empty() {
            return fresh;
        }
        let equity = self.equities();
        let mut liabilities = vec![0.0; self.banks.len()];
        for l in self.ledger.loans() {
            liabilities[l.borrower.0] += l.outstanding;
        }
        let mut borrowers: Vec<BankId> = pending.iter().map(|r| r.bank).collect();
        borrowers.sort();
        borrowers.dedup();
        borrowers.shuffle(&mut self.rng.interbank);
        let rho = self.params.reserve_ratio;

        for b in borrowers {
            for r in pending.iter().filter(|r| r.bank == b) {
                let shortfall = r.amount - self.banks[b.0].free_reserves(rho).max(0.0);
                if shortfall <= 0.0 {
                    self.grant(*r);
                    continue;
                }
                let best = (0..self.banks.len())
                    .map(BankId)
                    .filter(|&l| l != b && !self.banks[l.0].failed && self.banks[l.0].free_reserves(rho) >= shortfall)
                    .map(|l| (self.interbank_rate(l, equity[b.0], liabilities[b.0]), l))
                    .min_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
                let Some((rate, lender)) = best else { continue };
                let id = self
                    .ledger
                    .extend(b, lender, shortfall, rate - self.interbank_tax)
                    .expect("validated interbank loan");
                self.transfer(Party::Bank(lender), Party::Bank(b), shortfall);
                liabilities[b.0] += shortfall;
                fresh.push(id);
                let cost = rate * shortfall;
                self.grant(CreditRequest { rate: r.rate + cost / r.amount, ..*r });
            }
        }
        fresh
    }

    /// Firms shed workers they cannot pay or do not need, then hire from
    /// the unemployed in random order.
    pub fn job_market(&mut self) {
        let wage = self.params.wage;
        let targets: Vec<usize> = (0..self.firms.len())
            .map(|f| {
                let affordable = (self.firms[f].liquidity.max(0.0) / wage + 1e-9).floor() as usize;
                self.desired_workers(f).min(affordable)
            })
            .collect();
        for (f, &target) in targets.iter().enumerate() {
            while self.firms[f].workers.len() > target {
                let h = self.firms[f].workers.pop().expect("non-empty workforce");
                self.households[h].employer = None;
            }
        }
        let mut pool: Vec<usize> = self
            .households
            .iter()
            .enumerate()
            .filter(|(_, h)| h.kind == super::agents::HouseholdKind::Worker && h.employer.is_none())
            .map(|(i, _)| i)
            .collect();
        pool.shuffle(&mut self.rng.jobs);
        let mut order: Vec<usize> = (0..self.firms.len()).collect();
        order.shuffle(&mut self.rng.jobs);
        for f in order {
            while self.firms[f].workers.len() < targets[f] {
                let Some(h) = pool.pop() else { return };
                self.households[h].employer = Some(f);
                self.firms[f].workers.push(h);
            }
        }
    }

    /// Wages are paid, firms produce, and every household spends a share
    /// `c` of its account at the cheapest of `z` random firms first.
    pub fn goods_market(&mut self) {
        let (wage, alpha) = (self.params.wage, self.params.productivity);
        for f in 0..self.firms.len() {
            let workers = self.firms[f].workers.clone();
            for &h in &workers {
                self.transfer(Party::Firm(f), Party::Household(h), wage);
            }
            let firm = &mut self.firms[f];
            firm.wage_bill = wage * workers.len() as f64;
            firm.output = alpha * workers.len() as f64;
            firm.sold = 0.0;
            firm.revenue = 0.0;
            firm.interest_paid = 0.0;
        }
        let nf = self.firms.len();
        let z = self.params.search_breadth.min(nf);
        let mut order: Vec<usize> = (0..self.households.len()).collect();
        order.shuffle(&mut self.rng.goods);
        for h in order {
            let mut budget = self.params.consumption_share * self.households[h].account;
            let mut shops: Vec<usize> = index::sample(&mut self.rng.goods, nf, z).into_vec();
            if budget <= 0.0 {
                continue;
            }
            shops.sort_by(|&a, &b| self.firms[a].price.total_cmp(&self.firms[b].price).then(a.cmp(&b)));
            for f in shops {
                let firm = &self.firms[f];
                let stock = firm.output - firm.sold;
                if stock <= 0.0 {
                    continue;
                }
                let qty = stock.min(budget / firm.price);
                let cost = if qty == stock { qty * firm.price } else { budget };
                self.transfer(Party::Household(h), Party::Firm(f), cost);
                let firm = &mut self.firms[f];
                firm.sold += qty;
                firm.revenue += cost;
                budget -= cost;
                if budget <= 0.0 {
                    break;
                }
            }
        }
    }

    /// CDS premiums, then firm and interbank debt service. A firm that
    /// cannot meet its debt service in full is flagged insolvent and pays
    /// nothing. Contracts on repaid loans end with them.
    pub fn repayments(&mut self) {
        let contracts: Vec<_> = self
            .book
            .contracts()
            .map(|c| (c.buyer, c.seller, c.spread, c.surcharge, c.live_notional(&self.ledger)))
            .collect();
        for (buyer, seller, spread, surcharge, notional) in contracts {
            self.transfer(Party::Bank(buyer), Party::Bank(seller), spread * notional);
            self.transfer(Party::Bank(buyer), Party::Fund, surcharge * notional);
            self.fund.surcharges += surcharge * notional;
        }

        let repay = self.params.repayment_fraction;
        let principal_of = |face: f64, outstanding: f64| {
            let p = repay * face;
            if outstanding - p <= 1e-9 * face {
                outstanding
            } else {
                p
            }
        };

        let mut due = vec![0.0; self.firms.len()];
        for l in &self.firm_loans {
            due[l.firm] += principal_of(l.face_value, l.outstanding) + l.rate * l.outstanding;
        }
        for (f, &d) in due.iter().enumerate() {
            self.firms[f].insolvent = d > 0.0 && self.firms[f].liquidity < d;
        }
        for k in 0..self.firm_loans.len() {
            let l = &self.firm_loans[k];
            if self.firms[l.firm].insolvent {
                continue;
            }
            let principal = principal_of(l.face_value, l.outstanding);
            let interest = l.rate * l.outstanding;
            let (firm, bank) = (l.firm, l.bank);
            self.transfer(Party::Firm(firm), Party::Bank(bank), principal + interest);
            self.firms[firm].interest_paid += interest;
            self.firm_loans[k].outstanding -= principal;
        }
        self.firm_loans.retain(|l| l.outstanding > 0.0);

        let tax = self.interbank_tax;
        let ids = self.ledger.ids();
        for id in ids {
            let l = self.ledger.get(id).expect("listed loan").clone();
            let principal = principal_of(l.face_value, l.outstanding);
            self.transfer(Party::Bank(l.borrower), Party::Bank(l.lender), principal + l.rate * l.outstanding);
            self.transfer(Party::Bank(l.borrower), Party::Fund, tax * l.outstanding);
            self.fund.taxes += tax * l.outstanding;
            let left = l.outstanding - principal;
            if left > 0.0 {
                self.ledger.get_mut(id).expect("listed loan").outstanding = left;
            } else {
                self.ledger.remove(id);
            }
        }
        self.book.reconcile(&self.ledger);
    }

    /// Firm owners receive positive profit; banks pay equity above target
    /// to the households banking with them.
    pub fn pay_dividends(&mut self) {
        for f in 0..self.firms.len() {
            let firm = &self.firms[f];
            let dividend = (self.params.firm_payout * firm.profit()).min(firm.liquidity);
            if dividend > 0.0 {
                let owner = firm.owner;
                self.transfer(Party::Firm(f), Party::Household(owner), dividend);
            }
        }
        let equity = self.equities();
        let mut clients: Vec<Vec<usize>> = vec![Vec::new(); self.banks.len()];
        for (h, hh) in self.households.iter().enumerate() {
            clients[hh.bank.0].push(h);
        }
        for b in 0..self.banks.len() {
            let excess = equity[b] - self.banks[b].equity_target;
            if excess <= 0.0 || clients[b].is_empty() || self.banks[b].failed {
                continue;
            }
            let each = self.params.bank_payout * excess / clients[b].len() as f64;
            for &h in &clients[b] {
                self.transfer(Party::Bank(BankId(b)), Party::Household(h), each);
            }
        }
    }

    pub(crate) fn debtrank_now(&self, equity: &[f64]) -> Vec<f64> {
        let net = self.effective_network();
        let solvent: Vec<bool> = self.banks.iter().zip(equity).map(|(b, &e)| !b.failed && e > 0.0).collect();
        BankCapital::from_network(equity, &net.exposures)
            .map(|c| c.with_solvency(solvent))
            .and_then(|c| debtrank_profile(&net.exposures, &c))
            .unwrap_or_else(|_| vec![0.0; self.banks.len()])
    }

    /// DebtRank, weighted in-degree and clustering of the current effective
    /// exposure network.
    pub fn network_snapshot(&self) -> NetworkSnapshot {
        let equity = self.equities();
        let net = self.effective_network();
        NetworkSnapshot {
            step: self.step,
            debtrank: self.debtrank_now(&equity),
            in_degree: weighted_in_degree(&net),
            clustering: weighted_clustering(&net),
            interbank_volume: net.total_volume(),
            equity,
        }
    }

    /// Banks with non-positive equity fail and the cascade is resolved.
    /// On the last step a random bank is failed if nothing else did.
    fn bank_defaults(&mut self) -> usize {
        let equity = self.equities();
        let mut triggers: Vec<BankId> = (0..self.banks.len())
            .filter(|&b| !self.banks[b].failed && equity[b] <= 0.0)
            .map(BankId)
            .collect();
        let mut exogenous = false;
        if triggers.is_empty() && self.step >= self.horizon && self.params.terminal_shock {
            let live: Vec<usize> = (0..self.banks.len()).filter(|&b| !self.banks[b].failed).collect();
            if let Some(&b) = live.choose(&mut self.rng.shock) {
                triggers.push(BankId(b));
                exogenous = true;
            }
        }
        if triggers.is_empty() {
            return 0;
        }
        self.snapshot = Some(self.network_snapshot());
        let result = self.resolve_defaults(&triggers, exogenous);
        let n = result.size();
        self.cascade = Some(result);
        self.halted = true;
        n
    }
}
