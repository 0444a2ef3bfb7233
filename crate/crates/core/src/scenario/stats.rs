//! Histograms, moments, permutation tests and the dip test of unimodality.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Summary moments of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation (`n - 1` denominator); 0 for `n < 2`.
    pub std: f64,
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

impl Moments {
    pub fn of(samples: &[f64]) -> Self {
        let n = samples.len();
        if n == 0 {
            return Moments { n, mean: 0.0, std: 0.0, min: 0.0, median: 0.0, max: 0.0 };
        }
        let mean = samples.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        let median = if n % 2 == 1 {
            sorted[n / 2]
        } else {
            0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
        };
        Moments { n, mean, std: var.sqrt(), min: sorted[0], median, max: sorted[n - 1] }
    }
}

/// Fixed-edge histogram. Bin `k` covers `[edges[k], edges[k + 1])`, except
/// the last bin, which also holds its upper edge. Values outside the range
/// are clamped into the first or last bin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    /// `bins` equal-width bins over `[lo, hi]`.
    pub fn uniform(lo: f64, hi: f64, bins: usize) -> Self {
        assert!(bins > 0 && hi > lo, "empty histogram range");
        let width = (hi - lo) / bins as f64;
        let mut edges: Vec<f64> = (0..bins).map(|k| lo + k as f64 * width).collect();
        edges.push(hi);
        Histogram { counts: vec![0; bins], edges }
    }

    /// One bin per integer `0..=max`.
    pub fn integer(max: usize) -> Self {
        Histogram {
            edges: (0..=max + 1).map(|k| k as f64).collect(),
            counts: vec![0; max + 1],
        }
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn bin_of(&self, x: f64) -> usize {
        let last = self.bins() - 1;
        // first edge strictly greater than x, minus one
        let k = self.edges.partition_point(|&e| e <= x);
        k.saturating_sub(1).min(last)
    }

    pub fn add(&mut self, x: f64) {
        let k = self.bin_of(x);
        self.counts[k] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn merge(&mut self, other: &Histogram) -> Result<()> {
        if self.edges != other.edges {
            return Err(Error::Mismatch("histogram edges differ".into()));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        Ok(())
    }

    /// `(bin_lo, bin_hi, count)` per bin.
    pub fn rows(&self) -> impl Iterator<Item = (f64, f64, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .map(|(k, &c)| (self.edges[k], self.edges[k + 1], c))
    }
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        0.0
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

/// One-sided permutation p-values for the difference of means of two
/// samples, from the same set of relabellings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PermutationTest {
    pub mean_a: f64,
    pub mean_b: f64,
    /// p-value against `mean(a) < mean(b)`.
    pub p_a_below_b: f64,
    /// p-value against `mean(a) > mean(b)`.
    pub p_a_above_b: f64,
    pub permutations: usize,
}

/// Randomly relabels the pooled samples `permutations` times. Each
/// p-value counts the observed split as one of the relabellings, so it is
/// never below `1 / (permutations + 1)`.
pub fn permutation_test(a: &[f64], b: &[f64], permutations: usize, rng: &mut ChaCha8Rng) -> PermutationTest {
    let (mean_a, mean_b) = (mean(a), mean(b));
    if a.is_empty() || b.is_empty() {
        return PermutationTest { mean_a, mean_b, p_a_below_b: 1.0, p_a_above_b: 1.0, permutations };
    }
    let observed = mean_a - mean_b;
    let mut pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let total: f64 = pooled.iter().sum();
    let (na, nb) = (a.len() as f64, b.len() as f64);
    // a tolerance keeps exact ties (identical samples) counted as ties
    let tol = 1e-12 * (1.0 + observed.abs());
    let (mut below, mut above) = (1usize, 1usize);
    for _ in 0..permutations {
        let (head, _) = pooled.partial_shuffle(rng, a.len());
        let sa: f64 = head.iter().sum();
        let d = sa / na - (total - sa) / nb;
        if d <= observed + tol {
            below += 1;
        }
        if d >= observed - tol {
            above += 1;
        }
    }
    let denom = (permutations + 1) as f64;
    PermutationTest {
        mean_a,
        mean_b,
        p_a_below_b: below as f64 / denom,
        p_a_above_b: above as f64 / denom,
        permutations,
    }
}

/// Hartigan's dip statistic of the empirical distribution of `samples`:
/// the sup distance to the closest unimodal distribution function. The
/// smallest possible value is `1 / (2n)`.
pub fn dip_statistic(samples: &[f64]) -> f64 {
    let mut x = samples.to_vec();
    x.sort_by(f64::total_cmp);
    dip_sorted(&x)
}

// Index-for-index rendering of the classic greatest-convex-minorant /
// least-concave-majorant iteration, 1-based like the original.
fn dip_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n < 2 || sorted[n - 1] == sorted[0] {
        return if n == 0 { 0.0 } else { 1.0 / (2 * n) as f64 };
    }
    let x = |i: usize| sorted[i - 1];
    let mut mn = vec![0usize; n + 1];
    let mut mj = vec![0usize; n + 1];
    mn[1] = 1;
    for j in 2..=n {
        mn[j] = j - 1;
        loop {
            let mnj = mn[j];
            let mnmnj = mn[mnj];
            if mnj == 1 || (x(j) - x(mnj)) * ((mnj - mnmnj) as f64) < (x(mnj) - x(mnmnj)) * (j - mnj) as f64 {
                break;
            }
            mn[j] = mnmnj;
        }
    }
    mj[n] = n;
    for k in (1..n).rev() {
        mj[k] = k + 1;
        loop {
            let mjk = mj[k];
            let mjmjk = mj[mjk];
            if mjk == n
                || (x(k) - x(mjk)) * (mjk as f64 - mjmjk as f64) < (x(mjk) - x(mjmjk)) * (k as f64 - mjk as f64)
            {
                break;
            }
            mj[k] = mjmjk;
        }
    }

    let mut dip = 1.0f64;
    let (mut low, mut high) = (1usize, n);
    let mut gcm = vec![0usize; n + 2];
    let mut lcm = vec![0usize; n + 2];
    loop {
        gcm[1] = high;
        let mut i = 1;
        while gcm[i] > low {
            gcm[i + 1] = mn[gcm[i]];
            i += 1;
        }
        let l_gcm = i;
        let mut ig = l_gcm;
        let mut ix = ig - 1;

        lcm[1] = low;
        let mut i = 1;
        while lcm[i] < high {
            lcm[i + 1] = mj[lcm[i]];
            i += 1;
        }
        let l_lcm = i;
        let mut ih = l_lcm;
        let mut iv = 2;

        let mut d = 0.0f64;
        if l_gcm != 2 || l_lcm != 2 {
            loop {
                let gcmix = gcm[ix];
                let lcmiv = lcm[iv];
                if gcmix > lcmiv {
                    let gcmi1 = gcm[ix + 1];
                    let dx = (lcmiv - gcmi1 + 1) as f64
                        - (x(lcmiv) - x(gcmi1)) * (gcmix - gcmi1) as f64 / (x(gcmix) - x(gcmi1));
                    iv += 1;
                    if dx >= d {
                        d = dx;
                        ig = ix + 1;
                        ih = iv - 1;
                    }
                } else {
                    let lcmiv1 = lcm[iv - 1];
                    let dx = (x(gcmix) - x(lcmiv1)) * (lcmiv - lcmiv1) as f64 / (x(lcmiv) - x(lcmiv1))
                        - (gcmix as f64 - lcmiv1 as f64 - 1.0);
                    ix -= 1;
                    if dx >= d {
                        d = dx;
                        ig = ix + 1;
                        ih = iv;
                    }
                }
                ix = ix.max(1);
                iv = iv.min(l_lcm);
                if gcm[ix] == lcm[iv] {
                    break;
                }
            }
        } else {
            d = 1.0;
        }
        if d < dip {
            break;
        }

        let mut dip_l = 0.0f64;
        for j in ig..l_gcm {
            let (jb, je) = (gcm[j + 1], gcm[j]);
            let mut max_t = 1.0f64;
            if je - jb > 1 && x(je) != x(jb) {
                let c = (je - jb) as f64 / (x(je) - x(jb));
                for jj in jb..=je {
                    max_t = max_t.max((jj - jb + 1) as f64 - (x(jj) - x(jb)) * c);
                }
            }
            dip_l = dip_l.max(max_t);
        }
        let mut dip_u = 0.0f64;
        for j in ih..l_lcm {
            let (jb, je) = (lcm[j], lcm[j + 1]);
            let mut max_t = 1.0f64;
            if je - jb > 1 && x(je) != x(jb) {
                let c = (je - jb) as f64 / (x(je) - x(jb));
                for jj in jb..=je {
                    max_t = max_t.max((x(jj) - x(jb)) * c - (jj as f64 - jb as f64 - 1.0));
                }
            }
            dip_u = dip_u.max(max_t);
        }
        dip = dip.max(dip_l.max(dip_u));

        if low == gcm[ig] && high == lcm[ih] {
            break;
        }
        low = gcm[ig];
        high = lcm[ih];
    }
    dip / (2 * n) as f64
}

/// Dip statistic with a p-value calibrated against uniform samples of the
/// same size (the least favourable unimodal null).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DipTest {
    pub n: usize,
    pub dip: f64,
    pub p_value: f64,
    pub replicates: usize,
}

impl DipTest {
    pub fn is_multimodal(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

pub fn dip_test(samples: &[f64], replicates: usize, seed: u64) -> DipTest {
    let n = samples.len();
    let dip = dip_statistic(samples);
    if n < 4 {
        return DipTest { n, dip, p_value: 1.0, replicates: 0 };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u = vec![0.0; n];
    let mut hits = 0usize;
    for _ in 0..replicates {
        u.iter_mut().for_each(|v| *v = rng.gen::<f64>());
        if dip_statistic(&u) >= dip {
            hits += 1;
        }
    }
    DipTest {
        n,
        dip,
        p_value: (hits + 1) as f64 / (replicates + 1) as f64,
        replicates,
    }
}
