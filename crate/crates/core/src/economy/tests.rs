use super::*;
use crate::exposure::CdsContract;
use crate::matrix::BankId;
use crate::scenario::{run_scenario, ScenarioConfig};

fn b(i: usize) -> BankId {
    BankId(i)
}

fn tiny(regime: Regime) -> ScenarioConfig {
    ScenarioConfig {
        regime,
        seed: 11,
        banks: 6,
        firms: 15,
        households: 150,
        steps: 60,
        ..ScenarioConfig::default()
    }
}

/// A state with no loans and bank `j` holding `equity[j]` over its
/// deposits in reserves.
fn blank(regime: Regime, equity: &[f64]) -> EconomyState {
    let cfg = ScenarioConfig {
        regime,
        banks: equity.len(),
        firms: 2,
        households: 8,
        ..ScenarioConfig::default()
    };
    let mut s = EconomyState::new(&cfg, 3).unwrap();
    for (bank, &e) in s.banks.iter_mut().zip(equity) {
        bank.cash = bank.deposits + e;
        bank.specificity = 0.0;
        bank.interbank_specificity = 0.0;
    }
    s
}

/// Books an interbank loan and moves the cash, leaving equities unchanged.
fn lend(s: &mut EconomyState, borrower: usize, lender: usize, amount: f64) -> crate::exposure::LoanId {
    let id = s.ledger.extend(b(borrower), b(lender), amount, 0.0).unwrap();
    s.transfer(Party::Bank(b(lender)), Party::Bank(b(borrower)), amount);
    id
}

#[test]
fn money_is_conserved_every_step() {
    for regime in Regime::ALL {
        let cfg = tiny(regime);
        let mut s = EconomyState::new(&cfg, cfg.seed).unwrap();
        let money = s.money_total();
        while s.step_index() < cfg.steps && !s.halted() {
            s.step();
            assert!((s.money_total() - money).abs() <= 1e-9 * s.money_scale(), "{regime} step {}", s.step_index());
            let from_accounts = s.deposits_from_accounts();
            for (bank, d) in s.banks().iter().zip(&from_accounts) {
                assert!((bank.deposits - d).abs() <= 1e-9 * money);
            }
        }
    }
}

#[test]
fn initial_balance_sheets() {
    let cfg = tiny(Regime::NoCds);
    let s = EconomyState::new(&cfg, 1).unwrap();
    let equity = s.equities();
    for (bank, e) in s.banks().iter().zip(&equity) {
        assert!((e - 0.1 * bank.deposits).abs() < 1e-12);
    }
    let employed = s.households().iter().filter(|h| h.employer.is_some()).count();
    assert_eq!(employed, cfg.households - cfg.firms);
}

#[test]
fn firm_takes_the_cheapest_offer() {
    let mut s = blank(Regime::NoCds, &[50.0, 50.0, 50.0]);
    s.params.bank_search = 3;
    s.banks[0].specificity = 0.015;
    s.banks[1].specificity = 0.004;
    s.banks[2].specificity = 0.009;
    s.firms[0].liquidity = 0.0;
    s.firms[1].liquidity = 1e6;
    s.firms[0].expected_demand = 3.0;
    let pending = s.credit_market();
    assert!(pending.is_empty());
    assert_eq!(s.firm_loans.len(), 1);
    let loan = &s.firm_loans[0];
    assert_eq!(loan.bank, b(1));
    assert!((loan.rate - 0.024).abs() < 1e-15);
    assert_eq!(loan.face_value, 3.0);
}

#[test]
fn expensive_credit_is_scaled_down() {
    let mut s = blank(Regime::NoCds, &[50.0, 50.0, 50.0]);
    s.params.bank_search = 3;
    s.params.rate_ceiling = 0.03;
    s.banks[0].specificity = 0.02;
    s.banks[1].specificity = 0.03;
    s.banks[2].specificity = 0.025;
    s.firms[0].liquidity = 0.0;
    s.firms[1].liquidity = 1e6;
    s.firms[0].expected_demand = 4.0;
    s.credit_market();
    let loan = &s.firm_loans[0];
    assert_eq!(loan.bank, b(0));
    assert_eq!(loan.face_value, 0.5 * 4.0);
}

#[test]
fn tobin_tax_adds_to_interbank_rates() {
    let plain = blank(Regime::NoCds, &[5.0, 5.0, 5.0]);
    let taxed = blank(Regime::TobinTax, &[5.0, 5.0, 5.0]);
    let r0 = plain.interbank_rate(b(1), 5.0, 2.0);
    let r1 = taxed.interbank_rate(b(1), 5.0, 2.0);
    assert!((r1 - r0 - 0.002).abs() < 1e-15);
}

#[test]
fn tobin_tax_is_paid_to_the_fund() {
    let mut s = blank(Regime::TobinTax, &[5.0, 5.0, 5.0]);
    lend(&mut s, 0, 1, 10.0);
    let money = s.money_total();
    s.repayments();
    assert!((s.fund.taxes - 0.002 * 10.0).abs() < 1e-15);
    assert_eq!(s.fund.balance, s.fund.taxes);
    assert!((s.money_total() - money).abs() < 1e-12);
    assert!((s.ledger.total_outstanding() - 8.0).abs() < 1e-12);
}

#[test]
fn shortfall_is_borrowed_from_the_cheapest_lender() {
    let mut s = blank(Regime::NoCds, &[0.0, 30.0, 30.0]);
    s.banks[0].cash = s.params.reserve_ratio * s.banks[0].deposits;
    s.banks[1].interbank_specificity = 0.008;
    s.banks[2].interbank_specificity = 0.001;
    let request = CreditRequest { firm: 0, bank: b(0), amount: 4.0, rate: 0.03 };
    let fresh = s.interbank_loan_market(vec![request]);
    assert_eq!(fresh.len(), 1);
    let loan = s.ledger.get(fresh[0]).unwrap();
    assert_eq!((loan.borrower, loan.lender, loan.outstanding), (b(0), b(2), 4.0));
    assert_eq!(s.firm_loans.len(), 1);
    assert!(s.firm_loans[0].rate > 0.03);
}

#[test]
fn unfunded_firm_loan_is_not_paid_out() {
    let mut s = blank(Regime::NoCds, &[0.0, 0.0, 0.0]);
    for bank in &mut s.banks {
        bank.cash = s.params.reserve_ratio * bank.deposits;
    }
    let liquidity = s.firms[0].liquidity;
    let request = CreditRequest { firm: 0, bank: b(0), amount: 4.0, rate: 0.03 };
    assert!(s.interbank_loan_market(vec![request]).is_empty());
    assert!(s.firm_loans.is_empty());
    assert!(s.ledger.is_empty());
    assert_eq!(s.firms[0].liquidity, liquidity);
}

#[test]
fn isolated_bank_fails_alone() {
    let mut s = blank(Regime::NoCds, &[2.0, 3.0, 4.0]);
    let r = s.resolve_defaults(&[b(0)], true);
    assert_eq!(r.defaulted, vec![b(0)]);
    assert_eq!((r.rounds, r.loss, r.written_off), (1, 0.0, 0.0));
}

#[test]
fn three_bank_chain() {
    // 0 owes 1 five, 1 owes 2 four; 1 is wiped out, 2 survives
    let mut s = blank(Regime::NoCds, &[2.0, 3.0, 6.0]);
    lend(&mut s, 0, 1, 5.0);
    lend(&mut s, 1, 2, 4.0);
    let r = s.resolve_defaults(&[b(0)], false);
    assert_eq!(r.defaulted, vec![b(0), b(1)]);
    assert_eq!(r.rounds, 2);
    assert_eq!(r.written_off, 9.0);
    assert_eq!(r.loss, 3.0 + 4.0);
    assert_eq!(r.capital, 11.0);
    assert!(s.ledger.is_empty());
    assert!((s.equities()[2] - 2.0).abs() < 1e-12);
}

fn insure(s: &mut EconomyState, loan: crate::exposure::LoanId, seller: usize) {
    let l = s.ledger.get(loan).unwrap().clone();
    let c = CdsContract {
        id: s.book.next_id(),
        buyer: l.lender,
        seller: b(seller),
        reference_entity: l.borrower,
        reference_loan: loan,
        notional: l.outstanding,
        spread: 0.01,
        surcharge: 0.0,
        maturity: 5,
        covered: true,
    };
    s.book.register(c, &s.ledger, s.regime.policy()).unwrap();
}

#[test]
fn covered_protection_makes_the_lender_whole() {
    let mut s = blank(Regime::UnregulatedNaked, &[2.0, 3.0, 8.0]);
    let loan = lend(&mut s, 0, 1, 5.0);
    insure(&mut s, loan, 2);
    let money = s.money_total();
    let r = s.resolve_defaults(&[b(0)], false);
    assert_eq!(r.defaulted, vec![b(0)]);
    assert_eq!(r.protection_paid, 5.0);
    let e = s.equities();
    assert!((e[1] - 3.0).abs() < 1e-12);
    assert!((e[2] - 3.0).abs() < 1e-12);
    assert_eq!(r.loss, 5.0);
    assert!(s.book.is_empty());
    assert!((s.money_total() - money).abs() < 1e-12);
}

#[test]
fn fund_covers_seller_shortfall_only_when_regulated() {
    for (regime, fund_paid, unpaid) in [(Regime::RegulatedCovered, 3.0, 0.0), (Regime::UnregulatedNaked, 0.0, 3.0)] {
        let mut s = blank(regime, &[2.0, 3.0, 2.0]);
        let loan = lend(&mut s, 0, 1, 5.0);
        insure(&mut s, loan, 2);
        let r = s.resolve_defaults(&[b(0)], false);
        let close = |x: f64, y: f64| (x - y).abs() < 1e-12;
        assert!(close(r.protection_paid, 2.0), "{regime}");
        assert!(close(r.fund_paid, fund_paid), "{regime}");
        assert!(close(r.protection_unpaid, unpaid), "{regime}");
        assert!(close(s.fund.balance, -fund_paid));
    }
}

#[test]
fn firm_bankruptcy_splits_recovery_pro_rata() {
    let mut s = blank(Regime::NoCds, &[10.0, 10.0, 10.0]);
    for (bank, outstanding) in [(0, 4.0), (1, 2.0)] {
        s.firm_loans.push(FirmLoan { firm: 0, bank: b(bank), face_value: outstanding, rate: 0.02, outstanding });
    }
    // firm and owner hold 1.5 each; deposit moves leave bank equity alone
    let (owner, other) = (s.firms[0].owner, s.firms.len());
    let f = s.firms[0].liquidity;
    s.transfer(Party::Firm(0), Party::Household(owner), f - 1.5);
    let a = s.households[owner].account;
    s.transfer(Party::Household(owner), Party::Household(other), a - 1.5);
    assert_eq!(s.equities(), vec![14.0, 12.0, 10.0]);

    s.firm_bankruptcy(0, 9.0, 1.25);
    assert!(s.firm_loans.is_empty());
    assert_eq!(s.firms[0].liquidity, 0.0);
    assert_eq!(s.households[owner].account, 0.0);
    assert_eq!((s.firms[0].expected_demand, s.firms[0].price, s.firms[0].bankruptcies), (9.0, 1.25, 1));
    // 3 recovered against 4 : 2 owed
    let e = s.equities();
    assert!((e[0] - 12.0).abs() < 1e-12, "{e:?}");
    assert!((e[1] - 11.0).abs() < 1e-12, "{e:?}");
}

fn comparable(r: &crate::scenario::RunResult) -> String {
    format!("{:?} {:?} {:?} {}", r.reports, r.cascade, r.network, r.firm_bankruptcies)
}

#[test]
fn regimes_coincide_when_their_difference_is_switched_off() {
    let mut cfg = tiny(Regime::NoCds);
    cfg.abm.cds_demand = 0.0;
    cfg.abm.naked_demand = 0.0;
    cfg.tobin_rate = 0.0;
    let base = comparable(&run_scenario(&cfg).unwrap());
    for regime in [Regime::TobinTax, Regime::UnregulatedNaked, Regime::RegulatedCovered] {
        assert_eq!(comparable(&run_scenario(&cfg.with_regime(regime)).unwrap()), base, "{regime}");
    }
}

#[test]
fn regimes_differ_with_defaults() {
    let cfg = tiny(Regime::NoCds);
    let base = comparable(&run_scenario(&cfg).unwrap());
    for regime in [Regime::TobinTax, Regime::UnregulatedNaked, Regime::RegulatedCovered] {
        assert_ne!(comparable(&run_scenario(&cfg.with_regime(regime)).unwrap()), base, "{regime}");
    }
}

#[test]
fn market_gates() {
    for regime in Regime::ALL {
        let mut cfg = tiny(regime);
        cfg.abm.terminal_shock = false;
        cfg.abm.log_quotes = true;
        let mut s = EconomyState::new(&cfg, 5).unwrap();
        let mut naked = 0;
        let mut contracts = 0;
        while s.step_index() < 40 && !s.halted() {
            s.step();
            contracts += s.book.len();
            naked += s.book.contracts().filter(|c| !c.covered).count();
            for c in s.book.contracts() {
                assert!(c.surcharge >= 0.0);
                if regime != Regime::RegulatedCovered {
                    assert_eq!(c.surcharge, 0.0);
                }
            }
        }
        match regime {
            Regime::NoCds | Regime::TobinTax => assert_eq!(contracts, 0),
            Regime::RegulatedCovered => {
                assert!(contracts > 0);
                assert_eq!(naked, 0);
                assert!(!s.quote_log().is_empty());
            }
            Regime::UnregulatedNaked => {
                assert!(contracts > 0);
                assert!(s.quote_log().is_empty());
            }
        }
        if regime != Regime::TobinTax {
            assert_eq!(s.fund.taxes, 0.0);
        }
    }
}
