use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::matrix::format_money;
use crate::scenario::ScenarioAggregate;

/// File name and CSV body of each plot panel.
///
/// Every panel stacks one series per aggregate, keyed by the regime in
/// the first column. Aggregates without runs contribute no rows.
pub fn plot_tables(aggregates: &[ScenarioAggregate]) -> Vec<(&'static str, String)> {
    let live = || aggregates.iter().filter(|a| a.n_runs > 0);

    let mut loss = String::from("regime,bin_lo,bin_hi,count\n");
    let mut size = String::from("regime,size,count\n");
    let mut debtrank = String::from("regime,bank,mean_debtrank\n");
    let mut in_degree = String::from("regime,run,bank,in_degree\n");
    let mut clustering = String::from("regime,run,bank,clustering\n");
    for agg in live() {
        let r = agg.regime();
        for (lo, hi, c) in agg.loss_histogram.rows() {
            let _ = writeln!(loss, "{r},{},{},{c}", format_money(lo), format_money(hi));
        }
        for (lo, _, c) in agg.size_histogram.rows() {
            let _ = writeln!(size, "{r},{},{c}", lo as usize);
        }
        for (bank, v) in agg.mean_debtrank_by_bank().iter().enumerate() {
            let _ = writeln!(debtrank, "{r},{bank},{}", format_money(*v));
        }
        for run in &agg.runs {
            for (bank, v) in run.in_degree.iter().enumerate() {
                let _ = writeln!(in_degree, "{r},{},{bank},{}", run.index, format_money(*v));
            }
            for (bank, v) in run.clustering.iter().enumerate() {
                let _ = writeln!(clustering, "{r},{},{bank},{}", run.index, format_money(*v));
            }
        }
    }
    vec![
        ("plot_loss_histogram.csv", loss),
        ("plot_cascade_size.csv", size),
        ("plot_debtrank_by_bank.csv", debtrank),
        ("plot_in_degree.csv", in_degree),
        ("plot_clustering.csv", clustering),
    ]
}

/// Writes the [`plot_tables`] into `dir` and returns their paths.
pub fn emit_plot_data(aggregates: &[ScenarioAggregate], dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    plot_tables(aggregates)
        .into_iter()
        .map(|(name, body)| {
            let path = dir.join(name);
            std::fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
            Ok(path)
        })
        .collect()
}
