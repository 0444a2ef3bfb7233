//! Independent reference implementations shared by the test targets.
#![allow(dead_code)]

use cdsnet::Matrix;

/// Brute-force DebtRank written from the definition: `W` on the fly,
/// explicit three-valued status per bank, full recomputation per round.
pub fn oracle_debtrank(l: &[Vec<f64>], equity: &[f64], seed: usize) -> f64 {
    let n = l.len();
    let assets: Vec<f64> = (0..n).map(|j| (0..n).map(|i| l[i][j]).sum()).collect();
    let total: f64 = assets.iter().sum();
    if total == 0.0 {
        return 0.0;
    }
    let impact = |i: usize, j: usize| if i == j { 0.0 } else { f64::min(1.0, l[i][j] / equity[j]) };
    // 0 undistressed, 1 distressed, 2 inactive
    let mut status = vec![0u8; n];
    let mut h = vec![0.0; n];
    h[seed] = 1.0;
    status[seed] = 1;
    loop {
        if !status.contains(&1) {
            break;
        }
        let mut next = h.clone();
        for j in 0..n {
            let mut inflow = 0.0;
            for i in 0..n {
                if status[i] == 1 {
                    inflow += impact(i, j) * h[i];
                }
            }
            next[j] = f64::min(1.0, h[j] + inflow);
        }
        let mut status_next = status.clone();
        for j in 0..n {
            status_next[j] = match status[j] {
                1 => 2,
                0 if next[j] > 0.0 => 1,
                s => s,
            };
        }
        h = next;
        status = status_next;
    }
    (0..n).filter(|&j| j != seed).map(|j| assets[j] / total * h[j]).sum()
}

/// `c_i = 1/(s_i (k_i - 1)) sum_{j != h} (w_ij + w_ih)/2 a_ij a_ih a_jh`
/// over ordered pairs, straight from the definition.
pub fn barrat_direct(l: &Matrix) -> Vec<f64> {
    let n = l.dim();
    let w = |i: usize, j: usize| if i == j { 0.0 } else { l.get(i, j) + l.get(j, i) };
    let a = |i: usize, j: usize| if w(i, j) > 0.0 { 1.0 } else { 0.0 };
    (0..n)
        .map(|i| {
            let k: f64 = (0..n).map(|j| a(i, j)).sum();
            let s: f64 = (0..n).map(|j| w(i, j)).sum();
            if k < 2.0 {
                return 0.0;
            }
            let mut acc = 0.0;
            for j in 0..n {
                for h in 0..n {
                    if j != h {
                        acc += (w(i, j) + w(i, h)) / 2.0 * a(i, j) * a(i, h) * a(j, h);
                    }
                }
            }
            acc / (s * (k - 1.0))
        })
        .collect()
}

