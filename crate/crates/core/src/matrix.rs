//! Bank identifiers and the dense square matrix used for every exposure layer.

use std::fmt;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of a bank in `0..B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BankId(pub usize);

impl BankId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for BankId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Dense `n x n` matrix of money amounts, row-major.
///
/// Row index is the borrower (or reference entity), column index the exposed
/// bank. With B = 20 a dense layout is both smaller and faster than any sparse
/// representation.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    /// Builds a matrix from rows; panics if the rows are not square.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let mut m = Matrix::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "row {i} has length {} (expected {n})", row.len());
            m.data[i * n..(i + 1) * n].copy_from_slice(row);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.n + j] = value;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.n + j] += value;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.row(i).iter().sum()
    }

    pub fn col_sum(&self, j: usize) -> f64 {
        (0..self.n).map(|i| self.get(i, j)).sum()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// Elementwise `max(0, x)`.
    pub fn positive_part(&self) -> Matrix {
        Matrix {
            n: self.n,
            data: self.data.iter().map(|&x| x.max(0.0)).collect(),
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|&x| x >= 0.0)
    }

    pub fn has_zero_diagonal(&self) -> bool {
        (0..self.n).all(|i| self.get(i, i) == 0.0)
    }

    /// True when no pair carries weight in both directions.
    pub fn is_netted(&self) -> bool {
        (0..self.n).all(|i| (i + 1..self.n).all(|j| self.get(i, j) == 0.0 || self.get(j, i) == 0.0))
    }

    /// Writes the matrix as CSV: a header `borrower,<id>,...`, then one row per
    /// borrower with the exposure of each lender column.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["borrower".to_string()];
        header.extend((0..self.n).map(|j| j.to_string()));
        w.write_record(&header)?;
        for i in 0..self.n {
            let mut rec = vec![i.to_string()];
            rec.extend(self.row(i).iter().map(|x| format_money(*x)));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Matrix> {
        let mut r = csv::Reader::from_reader(input);
        let n = r.headers()?.len().saturating_sub(1);
        let mut m = Matrix::zeros(n);
        let mut rows = 0;
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            if i >= n || rec.len() != n + 1 {
                return Err(Error::Format(format!("matrix csv row {i} does not fit a {n}x{n} matrix")));
            }
            for j in 0..n {
                let v: f64 = rec[j + 1]
                    .trim()
                    .parse()
                    .map_err(|_| Error::Format(format!("bad number {:?} at row {i}, column {j}", &rec[j + 1])))?;
                m.set(i, j, v);
            }
            rows += 1;
        }
        if rows != n {
            return Err(Error::Format(format!("matrix csv has {rows} rows, expected {n}")));
        }
        Ok(m)
    }
}

/// Shortest representation that round-trips through `str::parse::<f64>`.
pub(crate) fn format_money(x: f64) -> String {
    format!("{x:?}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_exact() {
        let m = Matrix::from_rows(&[vec![0.0, 0.1, 1e-17], vec![3.0, 0.0, 2.5], vec![1.0 / 3.0, 7.0, 0.0]]);
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("borrower,0,1,2\n"));
        let back = Matrix::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn ragged_csv_is_rejected() {
        let text = "borrower,0,1\n0,0,1\n";
        assert!(Matrix::read_csv(text.as_bytes()).is_err());
    }

    #[test]
    fn netting_check() {
        let mut m = Matrix::zeros(3);
        m.set(0, 1, 2.0);
        assert!(m.is_netted());
        m.set(1, 0, 1.0);
        assert!(!m.is_netted());
    }
}
