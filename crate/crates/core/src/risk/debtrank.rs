//! DebtRank on the effective exposure network.
//!
//! Two-state propagation: the seed starts distressed with `h = 1`; at each
//! round every distressed bank `i` passes `W_ij h_i` to each `j`, where
//! `W_ij = min(1, L^eff_ij / E_j)`, then becomes inactive. Banks that picked
//! up distress for the first time become distressed. The loop stops when no
//! bank is distressed, which takes at most `B` rounds.

use crate::error::{Error, Result};
use crate::matrix::{BankId, Matrix};

/// Equity and economic-value weights of the banks.
#[derive(Debug, Clone, PartialEq)]
pub struct BankCapital {
    equity: Vec<f64>,
    solvent: Vec<bool>,
    weights: Vec<f64>,
    total_value: f64,
}

impl BankCapital {
    /// Explicit weights; every bank is treated as solvent.
    pub fn new(equity: Vec<f64>, weights: Vec<f64>, total_value: f64) -> Result<Self> {
        if equity.len() != weights.len() {
            return Err(Error::InvalidCapital("equity and weight vectors differ in length".into()));
        }
        if equity.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidCapital("equity must be finite".into()));
        }
        if weights.iter().any(|&w| !(w >= 0.0)) {
            return Err(Error::InvalidCapital("weights must be non-negative".into()));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidCapital(format!("weights sum to {sum}, not 1")));
        }
        if !(total_value >= 0.0 && total_value.is_finite()) {
            return Err(Error::InvalidCapital(format!("total value must be non-negative, got {total_value}")));
        }
        let n = equity.len();
        Ok(BankCapital {
            equity,
            solvent: vec![true; n],
            weights,
            total_value,
        })
    }

    /// Economic value from interbank assets: `v_j = sum_i L^eff_ij / V` with
    /// `V = sum L^eff`. Banks with non-positive equity are marked failed.
    /// An empty network gets uniform weights and `V = 0`.
    pub fn from_network(equity: &[f64], exposures: &Matrix) -> Result<Self> {
        let n = exposures.dim();
        if equity.len() != n {
            return Err(Error::InvalidCapital(format!(
                "{} equities for a {n}-bank network",
                equity.len()
            )));
        }
        if equity.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidCapital("equity must be finite".into()));
        }
        let assets: Vec<f64> = (0..n).map(|j| exposures.col_sum(j)).collect();
        let total: f64 = assets.iter().sum();
        let weights = if total > 0.0 {
            assets.iter().map(|a| a / total).collect()
        } else {
            vec![1.0 / n.max(1) as f64; n]
        };
        Ok(BankCapital {
            equity: equity.to_vec(),
            solvent: equity.iter().map(|&e| e > 0.0).collect(),
            weights,
            total_value: total,
        })
    }

    pub fn with_solvency(mut self, solvent: Vec<bool>) -> Self {
        assert_eq!(solvent.len(), self.equity.len());
        self.solvent = solvent;
        self
    }

    pub fn n_banks(&self) -> usize {
        self.equity.len()
    }

    pub fn equity(&self) -> &[f64] {
        &self.equity
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn solvent(&self) -> &[bool] {
        &self.solvent
    }

    pub fn total_value(&self) -> f64 {
        self.total_value
    }
}

/// Relative impacts `W_ij = min(1, L^eff_ij / E_j)`; zero towards failed
/// banks.
#[derive(Debug, Clone)]
pub struct ImpactMatrix {
    n: usize,
    w: Vec<f64>,
}

impl ImpactMatrix {
    pub fn new(exposures: &Matrix, capital: &BankCapital) -> Result<Self> {
        let n = exposures.dim();
        if capital.n_banks() != n {
            return Err(Error::InvalidCapital(format!(
                "capital covers {} banks, network has {n}",
                capital.n_banks()
            )));
        }
        for j in 0..n {
            if capital.solvent[j] && capital.equity[j] <= 0.0 {
                return Err(Error::ZeroEquity(BankId(j)));
            }
        }
        let inv: Vec<f64> = (0..n)
            .map(|j| if capital.solvent[j] { 1.0 / capital.equity[j] } else { 0.0 })
            .collect();
        let mut w = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    w[i * n + j] = (exposures.get(i, j) * inv[j]).min(1.0);
                }
            }
        }
        Ok(ImpactMatrix { n, w })
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.w[i * self.n + j]
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, value: f64) {
        self.w[i * self.n + j] = value;
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Final distress levels `h` after propagating from `seed`.
    pub fn propagate<'s>(&self, seed: usize, scratch: &'s mut Scratch) -> &'s [f64] {
        let n = self.n;
        scratch.reset(n);
        let Scratch { h, next, state, distressed } = scratch;
        h[seed] = 1.0;
        state[seed] = State::Distressed;
        distressed.push(seed);
        while !distressed.is_empty() {
            next.copy_from_slice(h);
            for &i in distressed.iter() {
                let hi = h[i];
                let row = &self.w[i * n..(i + 1) * n];
                for (nj, &wij) in next.iter_mut().zip(row) {
                    *nj += wij * hi;
                }
            }
            for x in next.iter_mut() {
                if *x > 1.0 {
                    *x = 1.0;
                }
            }
            for &i in distressed.iter() {
                state[i] = State::Inactive;
            }
            distressed.clear();
            for j in 0..n {
                if state[j] == State::Undistressed && next[j] > 0.0 {
                    state[j] = State::Distressed;
                    distressed.push(j);
                }
            }
            std::mem::swap(h, next);
        }
        h
    }

    /// `R_seed = sum_{j != seed} v_j h_j`.
    pub fn debtrank(&self, seed: usize, weights: &[f64], scratch: &mut Scratch) -> f64 {
        let h = self.propagate(seed, scratch);
        h.iter()
            .zip(weights)
            .enumerate()
            .filter(|&(j, _)| j != seed)
            .map(|(_, (hj, vj))| hj * vj)
            .sum()
    }

    pub fn debtrank_profile(&self, weights: &[f64], scratch: &mut Scratch) -> Vec<f64> {
        (0..self.n).map(|s| self.debtrank(s, weights, scratch)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    Undistressed,
    Distressed,
    Inactive,
}

/// Reusable buffers for [`ImpactMatrix::propagate`].
#[derive(Debug, Default)]
pub struct Scratch {
    h: Vec<f64>,
    next: Vec<f64>,
    state: Vec<State>,
    distressed: Vec<usize>,
}

impl Scratch {
    fn reset(&mut self, n: usize) {
        self.h.clear();
        self.h.resize(n, 0.0);
        self.next.clear();
        self.next.resize(n, 0.0);
        self.state.clear();
        self.state.resize(n, State::Undistressed);
        self.distressed.clear();
    }
}

/// DebtRank of `seed` on the effective network `exposures`.
pub fn debtrank(exposures: &Matrix, capital: &BankCapital, seed: BankId) -> Result<f64> {
    if seed.0 >= exposures.dim() {
        return Err(Error::UnknownBank(seed, exposures.dim()));
    }
    let w = ImpactMatrix::new(exposures, capital)?;
    Ok(w.debtrank(seed.0, capital.weights(), &mut Scratch::default()))
}

/// DebtRank of every bank.
pub fn debtrank_profile(exposures: &Matrix, capital: &BankCapital) -> Result<Vec<f64>> {
    let w = ImpactMatrix::new(exposures, capital)?;
    Ok(w.debtrank_profile(capital.weights(), &mut Scratch::default()))
}

/// `EL = sum_h P_h V R_h`.
pub fn expected_systemic_loss(exposures: &Matrix, capital: &BankCapital, p_def: &[f64]) -> Result<f64> {
    let w = ImpactMatrix::new(exposures, capital)?;
    Ok(expected_loss_with(&w, capital.weights(), capital.total_value(), p_def, &mut Scratch::default()))
}

pub(crate) fn expected_loss_with(w: &ImpactMatrix, weights: &[f64], total_value: f64, p_def: &[f64], scratch: &mut Scratch) -> f64 {
    if total_value == 0.0 {
        return 0.0;
    }
    let mut el = 0.0;
    for (h, &p) in p_def.iter().enumerate() {
        if p > 0.0 {
            el += p * total_value * w.debtrank(h, weights, scratch);
        }
    }
    el
}

#[cfg(test)]
mod tests {
    use super::*;

    fn equal(n: usize) -> Vec<f64> {
        vec![1.0 / n as f64; n]
    }

    #[test]
    fn isolated_seed_has_zero_rank() {
        let mut l = Matrix::zeros(3);
        l.set(1, 2, 5.0);
        let cap = BankCapital::new(vec![1.0; 3], equal(3), 5.0).unwrap();
        assert_eq!(debtrank(&l, &cap, BankId(0)).unwrap(), 0.0);
        assert_eq!(debtrank(&l, &cap, BankId(2)).unwrap(), 0.0);
    }

    #[test]
    fn two_bank_full_exposure() {
        // L^eff_{1,2} = E_2, v = (1/2, 1/2), seed 1 -> h_2 = 1, R = 1/2
        let mut l = Matrix::zeros(2);
        l.set(0, 1, 3.0);
        let cap = BankCapital::new(vec![7.0, 3.0], vec![0.5, 0.5], 3.0).unwrap();
        let w = ImpactMatrix::new(&l, &cap).unwrap();
        let mut s = Scratch::default();
        assert_eq!(w.propagate(0, &mut s), &[1.0, 1.0]);
        assert_eq!(debtrank(&l, &cap, BankId(0)).unwrap(), 0.5);
    }

    #[test]
    fn three_bank_chain() {
        // L^eff_{1,2} = E_2/2, L^eff_{2,3} = E_3/2 -> h = (1, .5, .25)
        let mut l = Matrix::zeros(3);
        l.set(0, 1, 2.0);
        l.set(1, 2, 3.0);
        let cap = BankCapital::new(vec![1.0, 4.0, 6.0], equal(3), 5.0).unwrap();
        let w = ImpactMatrix::new(&l, &cap).unwrap();
        let mut s = Scratch::default();
        assert_eq!(w.propagate(0, &mut s), &[1.0, 0.5, 0.25]);
        let r = debtrank(&l, &cap, BankId(0)).unwrap();
        assert!((r - (0.5 + 0.25) / 3.0).abs() < 1e-15);
    }

    #[test]
    fn cycles_terminate_and_stay_bounded() {
        let mut l = Matrix::zeros(3);
        for (i, j) in [(0, 1), (1, 2), (2, 0), (1, 0)] {
            l.set(i, j, 10.0);
        }
        let cap = BankCapital::new(vec![1.0; 3], equal(3), 40.0).unwrap();
        for seed in 0..3 {
            let r = debtrank(&l, &cap, BankId(seed)).unwrap();
            assert!((r - 2.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn solvent_zero_equity_is_an_error() {
        let l = Matrix::zeros(2);
        let cap = BankCapital::new(vec![1.0, 0.0], vec![0.5, 0.5], 0.0).unwrap();
        assert!(matches!(debtrank(&l, &cap, BankId(0)), Err(Error::ZeroEquity(BankId(1)))));
        let cap = cap.with_solvency(vec![true, false]);
        assert_eq!(debtrank(&l, &cap, BankId(0)).unwrap(), 0.0);
    }

    #[test]
    fn asset_share_weights() {
        let mut l = Matrix::zeros(3);
        l.set(0, 1, 3.0);
        l.set(2, 1, 1.0);
        l.set(1, 0, 4.0);
        let cap = BankCapital::from_network(&[1.0, 1.0, 1.0], &l).unwrap();
        assert_eq!(cap.weights(), &[0.5, 0.5, 0.0]);
        assert_eq!(cap.total_value(), 8.0);
        let empty = BankCapital::from_network(&[1.0, 1.0], &Matrix::zeros(2)).unwrap();
        assert_eq!(empty.weights(), &[0.5, 0.5]);
    }

    #[test]
    fn expected_loss_examples() {
        let mut l = Matrix::zeros(2);
        l.set(0, 1, 2.0);
        let cap = BankCapital::from_network(&[5.0, 2.0], &l).unwrap();
        assert_eq!(expected_systemic_loss(&l, &cap, &[0.0, 0.0]).unwrap(), 0.0);
        let empty = BankCapital::from_network(&[5.0, 2.0], &Matrix::zeros(2)).unwrap();
        assert_eq!(expected_systemic_loss(&Matrix::zeros(2), &empty, &[0.01, 0.01]).unwrap(), 0.0);
        // R_1 = v_2 h_2 = 1, R_2 = 0, V = 2
        let r1 = debtrank(&l, &cap, BankId(0)).unwrap();
        let r2 = debtrank(&l, &cap, BankId(1)).unwrap();
        assert_eq!((r1, r2), (1.0, 0.0));
        let el = expected_systemic_loss(&l, &cap, &[0.01, 0.01]).unwrap();
        assert!((el - 0.01 * 2.0 * (r1 + r2)).abs() < 1e-15);
    }
}
