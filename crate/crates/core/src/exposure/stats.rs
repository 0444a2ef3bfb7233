//! Network statistics on the effective exposure network.

use super::effective::EffectiveExposureNetwork;
use crate::matrix::Matrix;

/// Weighted in-degree of each bank: the total effective exposure it holds,
/// `sum_i L^eff_ij` (column sums).
pub fn weighted_in_degree(net: &EffectiveExposureNetwork) -> Vec<f64> {
    let m = &net.exposures;
    (0..m.dim()).map(|j| m.col_sum(j)).collect()
}

/// Barrat weighted clustering coefficient on the symmetrized network
/// `w = L^eff + (L^eff)^T`.
///
/// `c_i = 1 / (s_i (k_i - 1)) * sum_{j,h} (w_ij + w_ih) / 2 * a_ij a_ih a_jh`,
/// with strength `s_i`, degree `k_i` and `c_i = 0` when `k_i < 2`.
pub fn weighted_clustering(net: &EffectiveExposureNetwork) -> Vec<f64> {
    let w = symmetrize(&net.exposures);
    let n = w.dim();
    let neighbours: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| j != i && w.get(i, j) > 0.0).collect())
        .collect();
    (0..n)
        .map(|i| {
            let nb = &neighbours[i];
            let k = nb.len();
            if k < 2 {
                return 0.0;
            }
            let strength: f64 = nb.iter().map(|&j| w.get(i, j)).sum();
            let mut acc = 0.0;
            for (a, &j) in nb.iter().enumerate() {
                for &h in &nb[a + 1..] {
                    if w.get(j, h) > 0.0 {
                        // each unordered pair stands for (j,h) and (h,j)
                        acc += w.get(i, j) + w.get(i, h);
                    }
                }
            }
            (acc / (strength * (k as f64 - 1.0))).clamp(0.0, 1.0)
        })
        .collect()
}

fn symmetrize(m: &Matrix) -> Matrix {
    let n = m.dim();
    let mut w = Matrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                w.set(i, j, m.get(i, j) + m.get(j, i));
            }
        }
    }
    w
}

/// Linear-interpolated quantile of `values` (`q` in `[0, 1]`); `0` for an
/// empty slice.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn net(edges: &[(usize, usize, f64)], n: usize) -> EffectiveExposureNetwork {
        let mut m = Matrix::zeros(n);
        for &(i, j, w) in edges {
            m.set(i, j, w);
        }
        EffectiveExposureNetwork::from_matrix(m)
    }

    #[test]
    fn in_degree_examples() {
        assert_eq!(weighted_in_degree(&net(&[], 3)), vec![0.0; 3]);
        // L^eff_{1,2} = 10 (1-based)
        assert_eq!(weighted_in_degree(&net(&[(0, 1, 10.0)], 3)), vec![0.0, 10.0, 0.0]);
    }

    #[test]
    fn triangle_and_star() {
        let tri = net(&[(0, 1, 2.0), (1, 2, 2.0), (2, 0, 2.0)], 3);
        assert_eq!(weighted_clustering(&tri), vec![1.0; 3]);
        let star = net(&[(0, 1, 1.0), (0, 2, 3.0), (3, 0, 2.0), (0, 4, 1.0)], 5);
        assert_eq!(weighted_clustering(&star), vec![0.0; 5]);
    }

    #[test]
    fn direction_does_not_matter() {
        let a = net(&[(0, 1, 2.0), (1, 2, 1.0), (2, 0, 4.0), (2, 3, 1.0)], 4);
        let b = net(&[(1, 0, 2.0), (2, 1, 1.0), (0, 2, 4.0), (3, 2, 1.0)], 4);
        assert_eq!(weighted_clustering(&a), weighted_clustering(&b));
    }

    #[test]
    fn quantiles() {
        assert_eq!(quantile(&[], 0.75), 0.0);
        assert_eq!(quantile(&[3.0, 1.0, 2.0, 4.0, 5.0], 0.75), 4.0);
        assert_eq!(quantile(&[1.0, 2.0], 0.5), 1.5);
    }
}
