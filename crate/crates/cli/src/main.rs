//! `cdsnet`: run scenarios, compare regimes and show the exposure and
//! surcharge mechanics on small examples.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use cdsnet::economy::Regime;
use cdsnet::io::{emit_plot_data, parse_config, parse_config_str, write_results, Results};
use cdsnet::scenario::{compare_scenarios, monte_carlo, run_scenario, CompareOptions, Metric, ScenarioConfig};
use cdsnet::Error;
use clap::{Args, Parser, Subcommand};

mod demo;

#[derive(Parser)]
#[command(name = "cdsnet", version, about = "Interbank CDS networks and systemic surcharges")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate `runs` economies of one regime; a single run also writes
    /// its per-step CSV.
    Run,
    /// Simulate every regime with the same seeds and test the orderings.
    Compare,
    /// Run the regulated economy and log every surcharge quote.
    QuoteDemo,
    /// Print gross and effective exposures of the covered and naked
    /// textbook cases.
    NetDemo,
}

#[derive(Args)]
struct Opts {
    /// TOML configuration; defaults apply to missing keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, env = "CDSNET_OUT", default_value = "cdsnet-out")]
    out: PathBuf,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    runs: Option<usize>,
    /// Regime of `run`: no_cds, tobin_tax, unregulated_naked or regulated_covered.
    #[arg(long, global = true)]
    regime: Option<String>,
    /// Override a configuration key, e.g. `--set abm.wage=1.2`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    sets: Vec<String>,
    #[arg(long, short, global = true, conflicts_with = "verbose")]
    quiet: bool,
    #[arg(long, short, global = true)]
    verbose: bool,
}

impl Opts {
    fn config(&self) -> cdsnet::Result<ScenarioConfig> {
        let mut overrides = self.sets.clone();
        overrides.extend(self.seed.map(|s| format!("seed={s}")));
        overrides.extend(self.runs.map(|r| format!("runs={r}")));
        overrides.extend(self.regime.as_ref().map(|r| format!("regime={r}")));
        match &self.config {
            // an unreadable config file is a configuration problem too
            Some(path) => parse_config(path, &overrides).map_err(|e| match e {
                Error::Io { .. } => Error::Config(e.to_string()),
                e => e,
            }),
            None => parse_config_str("", &overrides),
        }
    }

    fn say(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", msg.as_ref());
        }
    }

    fn trace(&self, msg: impl AsRef<str>) {
        if self.verbose {
            eprintln!("{}", msg.as_ref());
        }
    }

    fn list(&self, files: &[PathBuf]) {
        for f in files {
            self.say(format!("  wrote {}", f.display()));
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 2 } else { 3 })
        }
    }
}

fn dispatch(cli: &Cli) -> cdsnet::Result<()> {
    let opts = &cli.opts;
    match cli.command {
        Command::NetDemo => {
            opts.say(demo::net_demo()?);
            Ok(())
        }
        Command::Run => run(opts, &opts.config()?),
        Command::Compare => compare(opts, &opts.config()?),
        Command::QuoteDemo => {
            let (text, files) = demo::quote_demo(&opts.config()?, &opts.out)?;
            opts.say(text);
            opts.list(&files);
            Ok(())
        }
    }
}

fn run(opts: &Opts, cfg: &ScenarioConfig) -> cdsnet::Result<()> {
    let t = Instant::now();
    if cfg.runs == 1 {
        let result = run_scenario(cfg)?;
        opts.trace(format!("simulated 1 run in {:.1}s", t.elapsed().as_secs_f64()));
        opts.say(format!(
            "{}: {} steps, cascade of {} banks, relative loss {:.4}, mean DebtRank {:.4}",
            cfg.regime,
            result.steps_run(),
            result.cascade_size(),
            result.relative_loss(),
            result.mean_debtrank()
        ));
        opts.list(&write_results(Results::Run { config: cfg, result: &result }, &opts.out)?);
        return Ok(());
    }
    let agg = monte_carlo(cfg, cfg.runs)?;
    opts.trace(format!("simulated {} runs in {:.1}s", cfg.runs, t.elapsed().as_secs_f64()));
    opts.say(format!("{} over {} runs:", cfg.regime, agg.n_runs));
    for m in Metric::ALL {
        let s = agg.moments(m);
        opts.say(format!("  {:<16} mean {:>10.4}  std {:>10.4}", m.name(), s.mean, s.std));
    }
    let mut files = write_results(Results::Aggregate(&agg), &opts.out)?;
    files.extend(emit_plot_data(std::slice::from_ref(&agg), &opts.out)?);
    opts.list(&files);
    Ok(())
}

fn compare(opts: &Opts, cfg: &ScenarioConfig) -> cdsnet::Result<()> {
    if opts.regime.is_some() {
        return Err(Error::Config("compare always simulates every regime; drop --regime".into()));
    }
    let mut aggregates = Vec::new();
    for r in Regime::ALL {
        let t = Instant::now();
        aggregates.push(monte_carlo(&cfg.with_regime(r), cfg.runs)?);
        opts.trace(format!("simulated {} runs of {r} in {:.1}s", cfg.runs, t.elapsed().as_secs_f64()));
    }
    let report = compare_scenarios(&aggregates, CompareOptions::default())?;

    opts.say(format!("{:<18} {:>13} {:>13} {:>13} {:>13}", "regime", "rel. loss", "DebtRank", "clustering", "in-deg q75"));
    for s in &report.regimes {
        opts.say(format!(
            "{:<18} {:>13.4} {:>13.4} {:>13.4} {:>13.4}",
            s.regime.name(),
            s.relative_loss.mean,
            s.mean_debtrank.mean,
            s.mean_clustering.mean,
            s.in_degree_q75.mean
        ));
    }
    use Regime::*;
    for metric in [Metric::RelativeLoss, Metric::MeanDebtRank] {
        for (lo, hi) in [(RegulatedCovered, NoCds), (NoCds, UnregulatedNaked), (TobinTax, NoCds)] {
            if let Some(t) = report.test(metric, lo, hi) {
                opts.say(format!("  {}: p({lo} < {hi}) = {:.4}", metric.name(), t.p_a_below_b));
            }
        }
    }

    let mut files = write_results(Results::Comparison { aggregates: &aggregates, report: &report }, &opts.out)?;
    files.extend(emit_plot_data(&aggregates, &opts.out)?);
    opts.list(&files);
    Ok(())
}
