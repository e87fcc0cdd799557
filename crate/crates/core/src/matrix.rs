//! Dense row-major matrices with the few factorizations this crate needs.
//!
//! Problem sizes here are desk-scale (side <= 200), so everything is a plain
//! `Vec<f64>` in row-major order: `data[i * cols + j]` holds entry `(i, j)`.
//! Entries must be finite; constructors reject NaN and infinities so that
//! downstream max-norm contracts are meaningful.
//!
//! JSON wire format: `{"rows": r, "cols": c, "data": [row-major numbers]}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tol;

/// Dense real matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix")]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

/// Unvalidated mirror of the JSON shape.
#[derive(Deserialize)]
struct RawMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl TryFrom<RawMatrix> for Matrix {
    type Error = Error;

    fn try_from(raw: RawMatrix) -> Result<Self> {
        Matrix::new(raw.rows, raw.cols, raw.data)
    }
}

impl Matrix {
    /// Builds a matrix from row-major data, validating length and finiteness.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidData {
                rows,
                cols,
                got: data.len(),
            });
        }
        for (index, &value) in data.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite { index, value });
            }
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Builds a matrix from row slices.
    ///
    /// Panics on ragged input; intended for literals in code and tests.
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        assert!(!rows.is_empty(), "matrix needs at least one row");
        let cols = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged rows");
            data.extend_from_slice(row);
        }
        Self::new(rows.len(), cols, data).expect("literal matrix")
    }

    /// Builds a matrix from nested vectors (the JSON `[[...], ...]` shape).
    pub fn from_nested(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidData {
                rows: 0,
                cols: 0,
                got: 0,
            });
        }
        let cols = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::InvalidData {
                    rows: rows.len(),
                    cols,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(rows.len(), cols, data)
    }

    /// Assembles `[[a, b], [c, d]]` from four equally sized square blocks.
    pub fn block2x2(a: &Matrix, b: &Matrix, c: &Matrix, d: &Matrix) -> Self {
        let n = a.rows;
        assert!(
            [a, b, c, d].iter().all(|m| m.rows == n && m.cols == n),
            "blocks must be square and equally sized"
        );
        let mut out = Self::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                out.data[i * 2 * n + j] = a.data[i * n + j];
                out.data[i * 2 * n + n + j] = b.data[i * n + j];
                out.data[(n + i) * 2 * n + j] = c.data[i * n + j];
                out.data[(n + i) * 2 * n + n + j] = d.data[i * n + j];
            }
        }
        out
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.cols + col] = value;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| factor * x).collect(),
        }
    }

    /// `self * other`; i-k-j loop order for row-major locality.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                expected_rows: self.cols,
                expected_cols: other.cols,
                rows: other.rows,
                cols: other.cols,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a_ik = self.data[i * self.cols + k];
                if a_ik == 0.0 {
                    continue;
                }
                let dst = i * other.cols;
                let src = k * other.cols;
                for j in 0..other.cols {
                    out.data[dst + j] += a_ik * other.data[src + j];
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        let mut out = vec![0.0; self.rows];
        for (i, slot) in out.iter_mut().enumerate() {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            *slot = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
        Ok(out)
    }

    /// Largest absolute entry.
    pub fn max_norm(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, x| acc.max(x.abs()))
    }

    /// Checks symmetry within `tol`; reports the first offending pair.
    pub fn check_symmetric(&self, tol: f64) -> Result<()> {
        if !self.is_square() {
            return Err(Error::OddDimension {
                rows: self.rows,
                cols: self.cols,
            });
        }
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let deviation = (self.get(i, j) - self.get(j, i)).abs();
                if deviation > tol {
                    return Err(Error::NotSymmetric { i, j, deviation });
                }
            }
        }
        Ok(())
    }

    /// Determinant via LU with partial pivoting.
    pub fn determinant(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(Error::OddDimension {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut lu = self.data.clone();
        let mut det = 1.0;
        let scale = self.max_norm().max(1.0);
        for k in 0..n {
            let mut pivot_row = k;
            let mut pivot_val = lu[k * n + k].abs();
            for r in (k + 1)..n {
                let v = lu[r * n + k].abs();
                if v > pivot_val {
                    pivot_val = v;
                    pivot_row = r;
                }
            }
            if pivot_val <= tol::RANK_TOL * scale {
                return Ok(0.0);
            }
            if pivot_row != k {
                for j in 0..n {
                    lu.swap(k * n + j, pivot_row * n + j);
                }
                det = -det;
            }
            let pivot = lu[k * n + k];
            det *= pivot;
            for r in (k + 1)..n {
                let factor = lu[r * n + k] / pivot;
                lu[r * n + k] = factor;
                for j in (k + 1)..n {
                    lu[r * n + j] -= factor * lu[k * n + j];
                }
            }
        }
        Ok(det)
    }

    /// Inverse via Gauss-Jordan with partial pivoting.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::OddDimension {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let scale = self.max_norm().max(1.0);
        let mut a = self.data.clone();
        let mut inv = Self::identity(n).data;
        for k in 0..n {
            let mut pivot_row = k;
            let mut pivot_val = a[k * n + k].abs();
            for r in (k + 1)..n {
                let v = a[r * n + k].abs();
                if v > pivot_val {
                    pivot_val = v;
                    pivot_row = r;
                }
            }
            if pivot_val <= tol::RANK_TOL * scale {
                return Err(Error::Singular {
                    index: k,
                    pivot: pivot_val,
                });
            }
            if pivot_row != k {
                for j in 0..n {
                    a.swap(k * n + j, pivot_row * n + j);
                    inv.swap(k * n + j, pivot_row * n + j);
                }
            }
            let pivot = a[k * n + k];
            for j in 0..n {
                a[k * n + j] /= pivot;
                inv[k * n + j] /= pivot;
            }
            for r in 0..n {
                if r == k {
                    continue;
                }
                let factor = a[r * n + k];
                if factor == 0.0 {
                    continue;
                }
                for j in 0..n {
                    a[r * n + j] -= factor * a[k * n + j];
                    inv[r * n + j] -= factor * inv[k * n + j];
                }
            }
        }
        Ok(Self {
            rows: n,
            cols: n,
            data: inv,
        })
    }

    /// Solves `self * x = b` through the explicit inverse.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        self.inverse()?.matvec(b)
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch {
                expected_rows: self.rows,
                expected_cols: self.cols,
                rows: other.rows,
                cols: other.cols,
            });
        }
        Ok(())
    }
}

/// Cholesky factorization in the `Q = L' * L` convention.
///
/// Returns the **upper-triangular** factor `L` with `Q = L' * L`. Note this
/// is the transpose of the lower-triangular factor most libraries return
/// (`Q = L * L'`); callers reconstructing `Q` must multiply as `L' * L`.
///
/// Rejects non-symmetric input (within [`tol::SYMMETRY_TOL`]) and reports
/// the failing pivot index for non-positive-definite input.
pub fn cholesky(q: &Matrix) -> Result<Matrix> {
    q.check_symmetric(tol::SYMMETRY_TOL)?;
    let n = q.rows();
    let mut l = Matrix::zeros(n, n);
    for i in 0..n {
        // Diagonal pivot: q_ii - sum_k l_ki^2.
        let mut pivot = q.get(i, i);
        for k in 0..i {
            pivot -= l.get(k, i) * l.get(k, i);
        }
        if pivot <= 0.0 {
            return Err(Error::NotPositiveDefinite { index: i, pivot });
        }
        let diag = pivot.sqrt();
        l.set(i, i, diag);
        for j in (i + 1)..n {
            let mut s = q.get(i, j);
            for k in 0..i {
                s -= l.get(k, i) * l.get(k, j);
            }
            l.set(i, j, s / diag);
        }
    }
    Ok(l)
}
