use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::monte_carlo::{Metric, ScenarioAggregate};
use super::stats::{dip_test, permutation_test, DipTest, Moments};
use crate::economy::Regime;
use crate::error::{Error, Result};

/// Knobs of the resampling tests.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompareOptions {
    pub permutations: usize,
    pub dip_replicates: usize,
    pub seed: u64,
}

impl Default for CompareOptions {
    fn default() -> Self {
        CompareOptions { permutations: 10_000, dip_replicates: 1_000, seed: 7 }
    }
}

/// One regime's row of the comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeSummary {
    pub regime: Regime,
    pub n_runs: usize,
    pub relative_loss: Moments,
    pub cascade_size: Moments,
    pub mean_debtrank: Moments,
    pub mean_clustering: Moments,
    pub in_degree_q75: Moments,
    pub debtrank_by_bank: Vec<f64>,
    /// Dip test on the relative-loss sample; reported, never asserted.
    pub loss_dip: DipTest,
}

/// Difference-of-means test of one metric between regimes `a` and `b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingTest {
    pub metric: Metric,
    pub a: Regime,
    pub b: Regime,
    pub mean_a: f64,
    pub mean_b: f64,
    pub p_a_below_b: f64,
    pub p_a_above_b: f64,
}

impl OrderingTest {
    /// Whether `a < b` is supported at level `alpha`.
    pub fn a_below_b(&self, alpha: f64) -> bool {
        self.p_a_below_b < alpha
    }

    pub fn a_above_b(&self, alpha: f64) -> bool {
        self.p_a_above_b < alpha
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub options: CompareOptions,
    pub regimes: Vec<RegimeSummary>,
    pub tests: Vec<OrderingTest>,
}

impl ComparisonReport {
    /// The test of `metric` between `a` and `b` in either orientation,
    /// returned as seen from `a`.
    pub fn test(&self, metric: Metric, a: Regime, b: Regime) -> Option<OrderingTest> {
        self.tests.iter().find_map(|t| {
            if t.metric != metric {
                None
            } else if t.a == a && t.b == b {
                Some(t.clone())
            } else if t.a == b && t.b == a {
                Some(OrderingTest {
                    metric,
                    a,
                    b,
                    mean_a: t.mean_b,
                    mean_b: t.mean_a,
                    p_a_below_b: t.p_a_above_b,
                    p_a_above_b: t.p_a_below_b,
                })
            } else {
                None
            }
        })
    }

    pub fn summary(&self, regime: Regime) -> Option<&RegimeSummary> {
        self.regimes.iter().find(|r| r.regime == regime)
    }
}

/// Summarises each aggregate and tests every metric between every pair.
///
/// Aggregates must share bank, firm and household counts, steps and run
/// count. Every test draws its permutations from its own stream, so the
/// report does not depend on the order in which tests are evaluated.
pub fn compare_scenarios(aggregates: &[ScenarioAggregate], options: CompareOptions) -> Result<ComparisonReport> {
    if aggregates.len() < 2 {
        return Err(Error::Mismatch("need at least two aggregates to compare".into()));
    }
    let key = |a: &ScenarioAggregate| (a.config.banks, a.config.firms, a.config.households, a.config.steps, a.n_runs);
    let first = key(&aggregates[0]);
    if let Some(bad) = aggregates.iter().find(|a| key(a) != first) {
        return Err(Error::Mismatch(format!(
            "{} has (banks, firms, households, steps, runs) = {:?}, expected {:?}",
            bad.regime(),
            key(bad),
            first
        )));
    }

    let regimes = aggregates
        .iter()
        .enumerate()
        .map(|(k, a)| RegimeSummary {
            regime: a.regime(),
            n_runs: a.n_runs,
            relative_loss: a.moments(Metric::RelativeLoss),
            cascade_size: a.moments(Metric::CascadeSize),
            mean_debtrank: a.moments(Metric::MeanDebtRank),
            mean_clustering: a.moments(Metric::MeanClustering),
            in_degree_q75: a.moments(Metric::InDegreeQ75),
            debtrank_by_bank: a.mean_debtrank_by_bank(),
            loss_dip: dip_test(&a.samples(Metric::RelativeLoss), options.dip_replicates, options.seed ^ k as u64),
        })
        .collect();

    let mut tests = Vec::new();
    let mut stream = 0u64;
    for i in 0..aggregates.len() {
        for j in i + 1..aggregates.len() {
            for metric in Metric::ALL {
                let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
                rng.set_stream(stream);
                stream += 1;
                let (a, b) = (&aggregates[i], &aggregates[j]);
                let t = permutation_test(&a.samples(metric), &b.samples(metric), options.permutations, &mut rng);
                tests.push(OrderingTest {
                    metric,
                    a: a.regime(),
                    b: b.regime(),
                    mean_a: t.mean_a,
                    mean_b: t.mean_b,
                    p_a_below_b: t.p_a_below_b,
                    p_a_above_b: t.p_a_above_b,
                });
            }
        }
    }
    Ok(ComparisonReport { options, regimes, tests })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{monte_carlo_range, ScenarioConfig};

    fn cfg(regime: Regime) -> ScenarioConfig {
        ScenarioConfig {
            regime,
            banks: 5,
            firms: 10,
            households: 60,
            steps: 12,
            ..ScenarioConfig::default()
        }
    }

    fn quick() -> CompareOptions {
        CompareOptions { permutations: 500, dip_replicates: 50, seed: 1 }
    }

    #[test]
    fn identical_aggregates_show_no_ordering() {
        let a = monte_carlo_range(&cfg(Regime::NoCds), 0..8, false).unwrap();
        let report = compare_scenarios(&[a.clone(), a], quick()).unwrap();
        assert_eq!(report.tests.len(), Metric::ALL.len());
        for t in &report.tests {
            assert_eq!(t.mean_a, t.mean_b);
            assert!(!t.a_below_b(0.05) && !t.a_above_b(0.05), "{t:?}");
        }
    }

    #[test]
    fn mismatched_batches_are_rejected() {
        let a = monte_carlo_range(&cfg(Regime::NoCds), 0..4, false).unwrap();
        let b = monte_carlo_range(&cfg(Regime::TobinTax), 0..3, false).unwrap();
        assert!(matches!(compare_scenarios(&[a.clone(), b], quick()), Err(Error::Mismatch(_))));
        assert!(compare_scenarios(&[a], quick()).is_err());
    }

    #[test]
    fn lookup_flips_orientation() {
        let a = monte_carlo_range(&cfg(Regime::NoCds), 0..4, false).unwrap();
        let b = monte_carlo_range(&cfg(Regime::TobinTax), 0..4, false).unwrap();
        let report = compare_scenarios(&[a, b], quick()).unwrap();
        let fwd = report.test(Metric::Loss, Regime::NoCds, Regime::TobinTax).unwrap();
        let back = report.test(Metric::Loss, Regime::TobinTax, Regime::NoCds).unwrap();
        assert_eq!(fwd.p_a_below_b, back.p_a_above_b);
        assert_eq!(fwd.mean_a, back.mean_b);
        assert!(report.test(Metric::Loss, Regime::NoCds, Regime::RegulatedCovered).is_none());
    }
}
