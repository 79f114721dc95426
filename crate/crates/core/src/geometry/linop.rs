use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};

/// A linear operator `R^n -> R^m`, stored as a dense row-major `m x n` matrix.
#[derive(Clone, PartialEq)]
pub struct LinOp {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl LinOp {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Empty("operator dimensions"));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "LinOp::new",
                expected: (rows, cols),
                found: (data.len() / cols.max(1), cols),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("operator"));
        }
        Ok(LinOp { rows, cols, data })
    }

    /// Builds an operator from its rows; all rows must share a length.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let m = rows.len();
        if m == 0 {
            return Err(Error::Empty("operator rows"));
        }
        let n = rows[0].as_ref().len();
        let mut data = Vec::with_capacity(m * n);
        for r in rows {
            let r = r.as_ref();
            if r.len() != n {
                return Err(Error::DimensionMismatch {
                    context: "LinOp::from_rows",
                    expected: (m, n),
                    found: (m, r.len()),
                });
            }
            data.extend_from_slice(r);
        }
        LinOp::new(m, n, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "operator dimensions must be positive");
        LinOp {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut op = LinOp::zeros(n, n);
        for i in 0..n {
            op.data[i * n + i] = 1.0;
        }
        op
    }

    /// `1 x n` operator with the given row.
    pub fn row_vector(v: &[f64]) -> Result<Self> {
        LinOp::new(1, v.len(), v.to_vec())
    }

    /// `m x m` diagonal operator.
    pub fn diagonal(d: &[f64]) -> Result<Self> {
        let m = d.len();
        if m == 0 {
            return Err(Error::Empty("diagonal"));
        }
        let mut op = LinOp::zeros(m, m);
        for (i, v) in d.iter().enumerate() {
            op.data[i * m + i] = *v;
        }
        if !op.data.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("diagonal"));
        }
        Ok(op)
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
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
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Entries in row-major order.
    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn apply(&self, h: &[f64]) -> Result<Vec<f64>> {
        if h.len() != self.cols {
            return Err(Error::DimensionMismatch {
                context: "LinOp::apply",
                expected: (self.cols, 1),
                found: (h.len(), 1),
            });
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), h)).collect())
    }

    /// Matrix product `self * rhs`.
    pub fn compose(&self, rhs: &LinOp) -> Result<LinOp> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                context: "LinOp::compose",
                expected: (self.cols, rhs.cols),
                found: rhs.dims(),
            });
        }
        let mut out = LinOp::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.get(k, j);
                }
            }
        }
        Ok(out)
    }

    pub fn scaled(&self, s: f64) -> LinOp {
        LinOp {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    /// Left multiplication by `diag(d)`: row `i` scaled by `d[i]`.
    pub fn scale_rows(&self, d: &[f64]) -> Result<LinOp> {
        if d.len() != self.rows {
            return Err(Error::DimensionMismatch {
                context: "LinOp::scale_rows",
                expected: (self.rows, 1),
                found: (d.len(), 1),
            });
        }
        let mut out = self.clone();
        for (i, s) in d.iter().enumerate() {
            for v in out.data[i * self.cols..(i + 1) * self.cols].iter_mut() {
                *v *= s;
            }
        }
        Ok(out)
    }

    pub fn max_abs_diff(&self, other: &LinOp) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| libm::fabs(a - b))
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(dot(&self.data, &self.data))
    }

    pub(crate) fn from_flat(rows: usize, cols: usize, data: Vec<f64>) -> LinOp {
        debug_assert_eq!(data.len(), rows * cols);
        LinOp { rows, cols, data }
    }

    pub(crate) fn check_dims(&self, expected: (usize, usize), context: &'static str) -> Result<()> {
        if self.dims() != expected {
            return Err(Error::DimensionMismatch {
                context,
                expected,
                found: self.dims(),
            });
        }
        Ok(())
    }
}

impl fmt::Debug for LinOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries((0..self.rows).map(|i| self.row(i)))
            .finish()
    }
}

impl Add for &LinOp {
    type Output = LinOp;

    fn add(self, rhs: &LinOp) -> LinOp {
        assert_eq!(self.dims(), rhs.dims(), "LinOp addition: dimension mismatch");
        LinOp {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &LinOp {
    type Output = LinOp;

    fn sub(self, rhs: &LinOp) -> LinOp {
        assert_eq!(self.dims(), rhs.dims(), "LinOp subtraction: dimension mismatch");
        LinOp {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &LinOp {
    type Output = LinOp;

    fn neg(self) -> LinOp {
        self.scaled(-1.0)
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_shapes() {
        assert!(LinOp::new(2, 2, vec![1.0; 3]).is_err());
        assert!(LinOp::new(0, 2, vec![]).is_err());
        assert!(LinOp::new(1, 1, vec![f64::NAN]).is_err());
        assert!(LinOp::from_rows(&[vec![1.0, 2.0], vec![3.0]]).is_err());
    }

    #[test]
    fn apply_and_compose() {
        let a = LinOp::from_rows(&[[1.0, 2.0], [0.0, -1.0]]).unwrap();
        assert_eq!(a.apply(&[1.0, 1.0]).unwrap(), vec![3.0, -1.0]);
        let id = LinOp::identity(2);
        assert_eq!(a.compose(&id).unwrap(), a);
        let d = a.scale_rows(&[2.0, 0.0]).unwrap();
        assert_eq!(d.to_rows(), vec![vec![2.0, 4.0], vec![0.0, 0.0]]);
    }
}
