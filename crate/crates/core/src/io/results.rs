use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::config::config_to_toml;
use crate::economy::{CascadeResult, StepReport};
use crate::error::{Error, Result};
use crate::matrix::format_money;
use crate::scenario::stats::{Histogram, Moments};
use crate::scenario::{
    ComparisonReport, CompareOptions, Metric, OrderingTest, RegimeSummary, RunResult, ScenarioAggregate,
    ScenarioConfig,
};

/// What [`write_results`] persists.
#[derive(Debug, Clone, Copy)]
pub enum Results<'a> {
    /// One run together with the configuration that produced it.
    Run { config: &'a ScenarioConfig, result: &'a RunResult },
    /// A Monte Carlo batch of one regime.
    Aggregate(&'a ScenarioAggregate),
    /// Batches of several regimes and the report comparing them.
    Comparison { aggregates: &'a [ScenarioAggregate], report: &'a ComparisonReport },
}

/// First 16 hex digits of the SHA-256 of the canonical TOML form.
pub fn config_hash(cfg: &ScenarioConfig) -> String {
    hex16(&Sha256::digest(config_to_toml(cfg).as_bytes()))
}

fn hex16(bytes: &[u8]) -> String {
    bytes.iter().take(8).fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Writes the CSV and summary files for `results` into `dir`, creating
/// it if needed, and returns the paths written in order. Names depend
/// only on the configurations, so a rerun overwrites the same files with
/// identical bytes.
///
/// A run gives `run-<regime>-<hash>.csv` (one row per step) and a
/// summary; a batch gives a histogram CSV and a summary; a comparison
/// gives one histogram CSV per regime and a single summary.
pub fn write_results(results: Results<'_>, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = Vec::new();
    let mut put = |name: String, body: String| -> Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        files.push(path);
        Ok(())
    };

    match results {
        Results::Run { config, result } => {
            if result.regime != config.regime || result.seed != config.seed {
                return Err(Error::Mismatch(format!(
                    "run ({}, seed {}) does not match its configuration ({}, seed {})",
                    result.regime, result.seed, config.regime, config.seed
                )));
            }
            let stem = format!("run-{}-{}", config.regime, config_hash(config));
            put(format!("{stem}.csv"), steps_csv(&result.reports))?;
            put(format!("{stem}.summary.toml"), to_toml(&RunDoc::new(config, result))?)?;
        }
        Results::Aggregate(agg) => {
            let stem = format!("batch-{}-{}", agg.regime(), config_hash(&agg.config));
            put(format!("{stem}.histograms.csv"), histograms_csv(agg))?;
            put(format!("{stem}.summary.toml"), to_toml(&BatchDoc::new(agg))?)?;
        }
        Results::Comparison { aggregates, report } => {
            let mut all = Sha256::new();
            for agg in aggregates {
                let hash = config_hash(&agg.config);
                all.update(hash.as_bytes());
                put(format!("compare-{}-{hash}.histograms.csv", agg.regime()), histograms_csv(agg))?;
            }
            let name = format!("compare-{}.summary.toml", hex16(&all.finalize()));
            put(name, to_toml(&ComparisonDoc::new(aggregates, report))?)?;
        }
    }
    Ok(files)
}

fn to_toml<T: Serialize>(doc: &T) -> Result<String> {
    toml::to_string(doc).map_err(|e| Error::Format(e.to_string()))
}

pub(crate) fn steps_csv(reports: &[StepReport]) -> String {
    let mut out = format!("{}\n", StepReport::CSV_HEADER);
    for r in reports {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

fn histograms_csv(agg: &ScenarioAggregate) -> String {
    let mut out = String::from("histogram,bin_lo,bin_hi,count\n");
    let mut emit = |name: &str, h: &Histogram| {
        for (lo, hi, count) in h.rows() {
            let _ = writeln!(out, "{name},{},{},{count}", format_money(lo), format_money(hi));
        }
    };
    emit("relative_loss", &agg.loss_histogram);
    emit("cascade_size", &agg.size_histogram);
    out
}

fn moments_by_metric(agg: &ScenarioAggregate) -> BTreeMap<&'static str, Moments> {
    Metric::ALL.iter().map(|&m| (m.name(), agg.moments(m))).collect()
}

fn seeds_of(agg: &ScenarioAggregate) -> Vec<u64> {
    agg.runs.iter().map(|r| r.seed).collect()
}

#[derive(Serialize)]
struct RunDoc<'a> {
    kind: &'static str,
    config_hash: String,
    #[serde(with = "crate::scenario::wide_u64")]
    seed: u64,
    steps_run: usize,
    loss: f64,
    relative_loss: f64,
    cascade_size: usize,
    mean_debtrank: f64,
    mean_clustering: f64,
    fund_balance: f64,
    firm_bankruptcies: u32,
    config: &'a ScenarioConfig,
    cascade: Option<&'a CascadeResult>,
}

impl<'a> RunDoc<'a> {
    fn new(config: &'a ScenarioConfig, r: &'a RunResult) -> Self {
        RunDoc {
            kind: "run",
            config_hash: config_hash(config),
            seed: r.seed,
            steps_run: r.steps_run(),
            loss: r.loss(),
            relative_loss: r.relative_loss(),
            cascade_size: r.cascade_size(),
            mean_debtrank: r.mean_debtrank(),
            mean_clustering: r.mean_clustering(),
            fund_balance: r.fund_balance,
            firm_bankruptcies: r.firm_bankruptcies,
            config,
            cascade: r.cascade.as_ref(),
        }
    }
}

#[derive(Serialize)]
struct BatchDoc<'a> {
    kind: &'static str,
    config_hash: String,
    n_runs: usize,
    /// Seed of each run, in run-index order.
    #[serde(with = "crate::scenario::wide_u64::vec")]
    seeds: Vec<u64>,
    config: &'a ScenarioConfig,
    moments: BTreeMap<&'static str, Moments>,
}

impl<'a> BatchDoc<'a> {
    fn new(agg: &'a ScenarioAggregate) -> Self {
        BatchDoc {
            kind: "batch",
            config_hash: config_hash(&agg.config),
            n_runs: agg.n_runs,
            seeds: seeds_of(agg),
            config: &agg.config,
            moments: moments_by_metric(agg),
        }
    }
}

#[derive(Serialize)]
struct ComparisonDoc<'a> {
    kind: &'static str,
    options: CompareOptions,
    batches: Vec<BatchDoc<'a>>,
    summaries: &'a [RegimeSummary],
    tests: &'a [OrderingTest],
}

impl<'a> ComparisonDoc<'a> {
    fn new(aggregates: &'a [ScenarioAggregate], report: &'a ComparisonReport) -> Self {
        ComparisonDoc {
            kind: "comparison",
            options: report.options,
            batches: aggregates.iter().map(BatchDoc::new).collect(),
            summaries: &report.regimes,
            tests: &report.tests,
        }
    }
}
