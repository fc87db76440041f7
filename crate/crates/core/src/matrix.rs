//! Dense exact matrices used for block counts and block densities.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::rational::{self, Rational};
use crate::{Error, Result};

/// A `rows × cols` matrix of exact rationals. Count matrices are stored as
/// rationals with unit denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TransitionMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl TransitionMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        TransitionMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 || rows.iter().any(|row| row.len() != c) {
            return Err(Error::Precondition("matrix rows must be nonempty and of equal length".into()));
        }
        Ok(TransitionMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&v| rational::int(v)).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn mul(&self, other: &TransitionMatrix) -> Result<TransitionMatrix> {
        if self.cols != other.rows {
            return Err(Error::Precondition(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if v.len() != self.cols {
            return Err(Error::Precondition(format!("vector of length {} for {} columns", v.len(), self.cols)));
        }
        Ok((0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect())
    }

    pub fn scaled(&self, factor: &Rational) -> TransitionMatrix {
        TransitionMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v * factor).collect() }
    }

    pub fn column_sums(&self) -> Vec<Rational> {
        (0..self.cols).map(|j| (0..self.rows).map(|i| self.get(i, j)).sum()).collect()
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|v| v.is_integer())
    }

    /// Largest `|a_ij − c|`.
    pub fn distance_to_constant(&self, c: &Rational) -> Rational {
        self.data.iter().map(|v| (v - c).abs()).max().unwrap_or_else(Rational::zero)
    }

    /// Smallest entry among the given rows.
    pub fn min_entry_in_rows(&self, rows: std::ops::Range<usize>) -> Option<Rational> {
        rows.flat_map(|i| self.row(i).iter()).min().cloned()
    }

    /// Divides each column by its sum.
    pub fn column_normalized(&self) -> Result<TransitionMatrix> {
        let sums = self.column_sums();
        let mut out = self.clone();
        for (j, s) in sums.iter().enumerate() {
            if s.is_zero() {
                return Err(Error::Precondition(format!("column {} sums to zero", j + 1)));
            }
            for i in 0..self.rows {
                let v = self.get(i, j) / s;
                out.set(i, j, v);
            }
        }
        Ok(out)
    }
}

impl fmt::Display for TransitionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let cells: Vec<String> = self.row(i).iter().map(rational::show).collect();
            writeln!(f, "{}", cells.join("\t"))?;
        }
        Ok(())
    }
}
