use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::agents::{Bank, Firm, FirmLoan, GuaranteeFund, Household, HouseholdKind};
use super::params::{AbmParams, Regime};
use super::report::{CascadeResult, NetworkSnapshot};
use crate::error::Result;
use crate::exposure::{effective_exposures, net_loans, CdsBook, EffectiveExposureNetwork, ExposureLedger};
use crate::matrix::BankId;
use crate::risk::{DefaultModel, SurchargeQuote};
use crate::scenario::ScenarioConfig;

/// Holder of money in the closed economy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Party {
    Household(usize),
    Firm(usize),
    Bank(BankId),
    Fund,
}

/// One RNG stream per market, so that regimes sharing a seed see the same
/// draws wherever their events coincide.
#[derive(Debug, Clone)]
pub(crate) struct Streams {
    pub planning: ChaCha8Rng,
    pub credit: ChaCha8Rng,
    pub interbank: ChaCha8Rng,
    pub cds: ChaCha8Rng,
    pub jobs: ChaCha8Rng,
    pub goods: ChaCha8Rng,
    pub shock: ChaCha8Rng,
}

impl Streams {
    fn new(seed: u64) -> (ChaCha8Rng, Self) {
        let stream = |k: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k);
            rng
        };
        (
            stream(0),
            Streams {
                planning: stream(1),
                credit: stream(2),
                interbank: stream(3),
                cds: stream(4),
                jobs: stream(5),
                goods: stream(6),
                shock: stream(7),
            },
        )
    }
}

/// The whole world of one run.
#[derive(Debug, Clone)]
pub struct EconomyState {
    pub(crate) step: u32,
    pub(crate) horizon: u32,
    pub(crate) regime: Regime,
    pub(crate) params: AbmParams,
    pub(crate) model: DefaultModel,
    pub(crate) zeta: f64,
    pub(crate) interbank_tax: f64,
    pub(crate) households: Vec<Household>,
    pub(crate) firms: Vec<Firm>,
    pub(crate) banks: Vec<Bank>,
    pub(crate) firm_loans: Vec<FirmLoan>,
    pub(crate) ledger: ExposureLedger,
    pub(crate) book: CdsBook,
    pub(crate) fund: GuaranteeFund,
    pub(crate) rng: Streams,
    pub(crate) halted: bool,
    pub(crate) cascade: Option<CascadeResult>,
    pub(crate) snapshot: Option<NetworkSnapshot>,
    pub(crate) quote_log: Vec<(u32, SurchargeQuote)>,
}

impl EconomyState {
    /// Builds the initial economy: one owner per firm, the remaining
    /// households are workers, all deposits assigned to uniformly random
    /// banks, and every bank starts with equity equal to `capital_ratio` of
    /// its deposits. Initial prices are spread by `adjustment` around
    /// `initial_price`.
    pub fn new(cfg: &ScenarioConfig, seed: u64) -> Result<Self> {
        cfg.validate()?;
        let p = &cfg.abm;
        let (mut init, rng) = Streams::new(seed);
        let (nb, nf, nh) = (cfg.banks, cfg.firms, cfg.households);

        let mut households: Vec<Household> = (0..nh)
            .map(|h| Household {
                kind: if h < nf { HouseholdKind::Owner(h) } else { HouseholdKind::Worker },
                account: p.initial_account,
                bank: BankId(init.gen_range(0..nb)),
                employer: None,
            })
            .collect();
        let mut firms: Vec<Firm> = (0..nf)
            .map(|f| Firm {
                owner: f,
                bank: BankId(init.gen_range(0..nb)),
                liquidity: p.initial_firm_liquidity,
                expected_demand: p.initial_demand,
                price: p.initial_price * (1.0 + p.adjustment * (init.gen::<f64>() - 0.5)),
                workers: Vec::new(),
                output: 0.0,
                sold: 0.0,
                revenue: 0.0,
                wage_bill: 0.0,
                interest_paid: 0.0,
                insolvent: false,
                bankruptcies: 0,
            })
            .collect();

        // spread workers evenly over firms to start from employment
        let mut workers: Vec<usize> = (nf..nh).collect();
        workers.shuffle(&mut init);
        for (k, h) in workers.into_iter().enumerate() {
            let f = k % nf;
            households[h].employer = Some(f);
            firms[f].workers.push(h);
        }

        let mut deposits = vec![0.0; nb];
        for h in &households {
            deposits[h.bank.0] += h.account;
        }
        for f in &firms {
            deposits[f.bank.0] += f.liquidity;
        }
        let banks = deposits
            .into_iter()
            .map(|d| {
                let equity = p.capital_ratio * d;
                Bank {
                    cash: d + equity,
                    deposits: d,
                    specificity: 0.0,
                    interbank_specificity: 0.0,
                    equity_target: equity,
                    failed: false,
                }
            })
            .collect();

        Ok(EconomyState {
            step: 0,
            horizon: cfg.steps,
            regime: cfg.regime,
            params: p.clone(),
            model: cfg.default_model(),
            zeta: cfg.zeta,
            interbank_tax: cfg.interbank_tax(),
            households,
            firms,
            banks,
            firm_loans: Vec::new(),
            ledger: ExposureLedger::new(nb),
            book: CdsBook::new(nb),
            fund: GuaranteeFund {
                balance: p.fund_seed_capital,
                ..GuaranteeFund::default()
            },
            rng,
            halted: false,
            cascade: None,
            snapshot: None,
            quote_log: Vec::new(),
        })
    }

    pub fn step_index(&self) -> u32 {
        self.step
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn params(&self) -> &AbmParams {
        &self.params
    }

    pub fn households(&self) -> &[Household] {
        &self.households
    }

    pub fn firms(&self) -> &[Firm] {
        &self.firms
    }

    pub fn banks(&self) -> &[Bank] {
        &self.banks
    }

    pub fn firm_loans(&self) -> &[FirmLoan] {
        &self.firm_loans
    }

    pub fn ledger(&self) -> &ExposureLedger {
        &self.ledger
    }

    pub fn book(&self) -> &CdsBook {
        &self.book
    }

    pub fn fund(&self) -> &GuaranteeFund {
        &self.fund
    }

    /// True once a cascade has been resolved; later steps do nothing.
    pub fn halted(&self) -> bool {
        self.halted
    }

    pub fn cascade(&self) -> Option<&CascadeResult> {
        self.cascade.as_ref()
    }

    /// Network statistics taken right before the cascade.
    pub fn snapshot(&self) -> Option<&NetworkSnapshot> {
        self.snapshot.as_ref()
    }

    pub fn quote_log(&self) -> &[(u32, SurchargeQuote)] {
        &self.quote_log
    }

    pub fn n_banks(&self) -> usize {
        self.banks.len()
    }

    /// Total money: bank reserves plus the fund. Deposits are claims on
    /// reserves, so this is the conserved quantity of the closed economy.
    pub fn money_total(&self) -> f64 {
        self.banks.iter().map(|b| b.cash).sum::<f64>() + self.fund.balance
    }

    /// Gross scale of money holdings, used for relative tolerances.
    pub fn money_scale(&self) -> f64 {
        self.banks.iter().map(|b| b.cash.abs()).sum::<f64>() + self.fund.balance.abs()
    }

    /// Balance-sheet equity of every bank: reserves + firm loans +
    /// interbank assets - deposits - interbank liabilities.
    pub fn equities(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self.banks.iter().map(|b| b.cash - b.deposits).collect();
        for l in &self.firm_loans {
            e[l.bank.0] += l.outstanding;
        }
        for l in self.ledger.loans() {
            e[l.lender.0] += l.outstanding;
            e[l.borrower.0] -= l.outstanding;
        }
        e
    }

    /// Deposits recomputed from the accounts, for consistency checks.
    pub fn deposits_from_accounts(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.banks.len()];
        for h in &self.households {
            d[h.bank.0] += h.account;
        }
        for f in &self.firms {
            d[f.bank.0] += f.liquidity;
        }
        d
    }

    pub fn effective_network(&self) -> EffectiveExposureNetwork {
        effective_exposures(&net_loans(&self.ledger), &self.book, &self.ledger)
    }

    fn debit(&mut self, party: Party, amount: f64) {
        match party {
            Party::Household(h) => {
                let hh = &mut self.households[h];
                hh.account -= amount;
                let b = &mut self.banks[hh.bank.0];
                b.deposits -= amount;
                b.cash -= amount;
            }
            Party::Firm(f) => {
                let firm = &mut self.firms[f];
                firm.liquidity -= amount;
                let b = &mut self.banks[firm.bank.0];
                b.deposits -= amount;
                b.cash -= amount;
            }
            Party::Bank(b) => self.banks[b.0].cash -= amount,
            Party::Fund => self.fund.balance -= amount,
        }
    }

    /// Moves `amount` from one holder to another. Deposit transfers move
    /// reserves between the banks holding the accounts.
    pub fn transfer(&mut self, from: Party, to: Party, amount: f64) {
        if amount == 0.0 || from == to {
            return;
        }
        self.debit(from, amount);
        self.debit(to, -amount);
    }
}
