use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use cdsnet::economy::{EconomyState, Regime};
use cdsnet::exposure::{effective_exposures, net_loans, CdsBook, CdsContract, ContractPolicy, ExposureLedger};
use cdsnet::io::config_hash;
use cdsnet::risk::{debtrank_profile, select_counterparty, BankCapital, SurchargeQuote};
use cdsnet::scenario::ScenarioConfig;
use cdsnet::{BankId, Error, Matrix, Result};

const EQUITY: f64 = 2.0;

fn matrix_block(out: &mut String, title: &str, m: &Matrix) {
    let _ = writeln!(out, "  {title} (row borrows from column)");
    for i in 0..m.dim() {
        let row: Vec<String> = m.row(i).iter().map(|x| format!("{x:6.2}")).collect();
        let _ = writeln!(out, "    {}", row.join(" "));
    }
}

fn debtrank_line(out: &mut String, title: &str, m: &Matrix) -> Result<()> {
    let equity = vec![EQUITY; m.dim()];
    let cap = BankCapital::from_network(&equity, m)?;
    let r: Vec<String> = debtrank_profile(m, &cap)?.iter().map(|x| format!("{x:.3}")).collect();
    let _ = writeln!(out, "  DebtRank on {title}: [{}]", r.join(", "));
    Ok(())
}

/// One loan `borrower -> lender` insured by `buyer` with `seller`.
fn example(borrower: usize, lender: usize, buyer: usize, seller: usize, amount: f64, covered: bool) -> Result<String> {
    let mut ledger = ExposureLedger::new(4);
    let loan = ledger.extend(BankId(borrower), BankId(lender), amount, 0.0)?;
    let mut book = CdsBook::new(4);
    let c = CdsContract {
        id: book.next_id(),
        buyer: BankId(buyer),
        seller: BankId(seller),
        reference_entity: BankId(borrower),
        reference_loan: loan,
        notional: amount,
        spread: 0.01,
        surcharge: 0.0,
        maturity: 5,
        covered,
    };
    let policy = if covered { ContractPolicy::CoveredOnly } else { ContractPolicy::AllowNaked };
    book.register(c, &ledger, policy)?;
    let gross = net_loans(&ledger);
    let eff = effective_exposures(&gross, &book, &ledger);

    let mut out = String::new();
    let kind = if covered { "covered" } else { "naked" };
    let _ = writeln!(
        out,
        "{kind} CDS: bank {borrower} owes bank {lender} {amount}; bank {buyer} buys protection on {borrower} from bank {seller}"
    );
    matrix_block(&mut out, "loans", gross.matrix());
    matrix_block(&mut out, "effective exposures", &eff.exposures);
    for r in &eff.naked_receivables {
        let _ = writeln!(
            out,
            "  naked receivable: bank {} collects {} if bank {} defaults",
            r.beneficiary, r.amount, r.reference_entity
        );
    }
    debtrank_line(&mut out, "loans", gross.matrix())?;
    debtrank_line(&mut out, "effective exposures", &eff.exposures)?;
    Ok(out)
}

pub fn net_demo() -> Result<String> {
    Ok(format!("{}\n{}", example(1, 0, 0, 2, 7.3, true)?, example(2, 3, 0, 1, 4.1, false)?))
}

/// Runs the configured economy under the regulated regime with quote
/// logging, writes every quote and returns a digest.
pub fn quote_demo(cfg: &ScenarioConfig, out: &Path) -> Result<(String, Vec<PathBuf>)> {
    let mut cfg = cfg.with_regime(Regime::RegulatedCovered);
    cfg.abm.log_quotes = true;
    cfg.validate()?;
    let mut state = EconomyState::new(&cfg, cfg.seed)?;
    while state.step_index() < cfg.steps && !state.halted() {
        state.step();
    }
    let log = state.quote_log();

    // quotes of one request are logged together
    let mut rounds: Vec<&[(u32, SurchargeQuote)]> = Vec::new();
    let mut start = 0;
    for k in 1..=log.len() {
        let same = |a: &(u32, SurchargeQuote), b: &(u32, SurchargeQuote)| {
            a.0 == b.0 && a.1.buyer == b.1.buyer && a.1.reference_loan == b.1.reference_loan
        };
        if k == log.len() || !same(&log[start], &log[k]) {
            if k > start {
                rounds.push(&log[start..k]);
            }
            start = k;
        }
    }
    let taxed = log.iter().filter(|(_, q)| q.tau > 0.0).count();

    let mut text = String::new();
    let _ = writeln!(
        text,
        "{} steps, {} quote rounds, {} quotes, {} with a positive surcharge",
        state.step_index(),
        rounds.len(),
        log.len(),
        taxed
    );
    if let Some(round) = rounds.iter().find(|r| r.len() > 1 && r.iter().any(|(_, q)| q.tau > 0.0)).or(rounds.first()) {
        let quotes: Vec<SurchargeQuote> = round.iter().map(|(_, q)| q.clone()).collect();
        let chosen = select_counterparty(&quotes).map(|q| q.seller);
        let (step, first) = &round[0];
        let _ = writeln!(
            text,
            "step {step}: bank {} insures its loan to bank {}",
            first.buyer, first.reference_entity
        );
        let _ = writeln!(text, "  seller     delta EL          tau        s_eff");
        for q in &quotes {
            let mark = if Some(q.seller) == chosen { "  <- chosen" } else { "" };
            let _ = writeln!(
                text,
                "  {:>6} {:>12.6} {:>12.6} {:>12.6}{mark}",
                q.seller.0, q.delta_el, q.tau, q.effective_spread
            );
        }
    }

    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let path = out.join(format!("quotes-{}.csv", config_hash(&cfg)));
    let mut csv = format!("{}\n", SurchargeQuote::CSV_HEADER);
    for (step, q) in log {
        csv.push_str(&q.csv_row(*step));
        csv.push('\n');
    }
    std::fs::write(&path, csv).map_err(|e| Error::io(&path, e))?;
    Ok((text.trim_end().to_owned(), vec![path]))
}
