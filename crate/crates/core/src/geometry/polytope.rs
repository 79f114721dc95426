use alloc::vec::Vec;

use crate::error::{Error, Result};

use super::hull::prune_hull;
use super::linop::LinOp;
use super::Tolerance;

/// Convex hull of finitely many `m x n` operators (V-representation).
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorPolytope {
    dims: (usize, usize),
    generators: Vec<LinOp>,
}

impl OperatorPolytope {
    pub fn new(generators: Vec<LinOp>) -> Result<Self> {
        let first = generators.first().ok_or(Error::Empty("polytope generators"))?;
        let dims = first.dims();
        for g in &generators {
            g.check_dims(dims, "OperatorPolytope::new")?;
        }
        Ok(OperatorPolytope { dims, generators })
    }

    pub fn singleton(op: LinOp) -> Self {
        OperatorPolytope {
            dims: op.dims(),
            generators: alloc::vec![op],
        }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        OperatorPolytope::singleton(LinOp::zeros(rows, cols))
    }

    /// Scalar (`1 x 1`) interval `conv{lo, hi}`.
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        OperatorPolytope::new(alloc::vec![
            LinOp::new(1, 1, alloc::vec![lo])?,
            LinOp::new(1, 1, alloc::vec![hi])?,
        ])
    }

    /// `1 x n` polytope with the given row vectors as generators.
    pub fn from_row_vectors<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let gens = rows
            .iter()
            .map(|r| LinOp::row_vector(r.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        OperatorPolytope::new(gens)
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    #[inline]
    pub fn generators(&self) -> &[LinOp] {
        &self.generators
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn into_generators(self) -> Vec<LinOp> {
        self.generators
    }

    /// Removes generators lying in the convex hull of the others.
    pub fn pruned(&self, tol: &Tolerance) -> Result<Self> {
        let pts: Vec<Vec<f64>> = self.generators.iter().map(|g| g.as_slice().to_vec()).collect();
        let kept = prune_hull(pts, tol.eps_prune)?;
        let (m, n) = self.dims;
        Ok(OperatorPolytope {
            dims: self.dims,
            generators: kept.into_iter().map(|p| LinOp::from_flat(m, n, p)).collect(),
        })
    }

    /// `s * P`; a negative factor reflects the polytope.
    pub fn scaled(&self, s: f64) -> Self {
        OperatorPolytope {
            dims: self.dims,
            generators: self.generators.iter().map(|g| g.scaled(s)).collect(),
        }
    }

    /// `diag(d) * P`, scaling row `i` of every generator by `d[i]`.
    pub fn scale_rows(&self, d: &[f64]) -> Result<Self> {
        Ok(OperatorPolytope {
            dims: self.dims,
            generators: self
                .generators
                .iter()
                .map(|g| g.scale_rows(d))
                .collect::<Result<Vec<_>>>()?,
        })
    }

    /// `P - T`, translating every generator.
    pub fn translated(&self, by: &LinOp) -> Result<Self> {
        by.check_dims(self.dims, "OperatorPolytope::translated")?;
        Ok(OperatorPolytope {
            dims: self.dims,
            generators: self.generators.iter().map(|g| g - by).collect(),
        })
    }

    /// Images `A * G` (left composition) of every generator.
    pub fn left_compose(&self, a: &LinOp) -> Result<Self> {
        let gens = self
            .generators
            .iter()
            .map(|g| a.compose(g))
            .collect::<Result<Vec<_>>>()?;
        OperatorPolytope::new(gens)
    }

    /// The `1 x n` polytope spanned by row `j` of every generator (unpruned).
    pub fn row_polytope(&self, j: usize) -> Result<Self> {
        if j >= self.dims.0 {
            return Err(Error::InvalidArgument("row index out of range"));
        }
        let gens = self
            .generators
            .iter()
            .map(|g| LinOp::from_flat(1, self.dims.1, g.row(j).to_vec()))
            .collect();
        Ok(OperatorPolytope {
            dims: (1, self.dims.1),
            generators: gens,
        })
    }

    /// Stacks `1 x n` row polytopes into an `m x n` polytope whose row
    /// projections are exactly the given rows. Generator `k` takes vertex
    /// `min(k, len_j - 1)` in row `j`, so the generator count is the largest
    /// row count instead of the product of all row counts.
    pub fn from_row_polytopes(rows: &[OperatorPolytope]) -> Result<Self> {
        let first = rows.first().ok_or(Error::Empty("row polytopes"))?;
        let n = first.dims.1;
        for r in rows {
            if r.dims != (1, n) {
                return Err(Error::DimensionMismatch {
                    context: "OperatorPolytope::from_row_polytopes",
                    expected: (1, n),
                    found: r.dims,
                });
            }
        }
        let m = rows.len();
        let count = rows.iter().map(|r| r.len()).max().unwrap_or(1);
        let gens = (0..count)
            .map(|k| {
                let mut data = Vec::with_capacity(m * n);
                for r in rows {
                    let g = &r.generators[k.min(r.len() - 1)];
                    data.extend_from_slice(g.as_slice());
                }
                LinOp::from_flat(m, n, data)
            })
            .collect();
        Ok(OperatorPolytope {
            dims: (m, n),
            generators: gens,
        })
    }

    /// Row-wise pruning followed by [`from_row_polytopes`](Self::from_row_polytopes).
    /// Keeps every row projection, hence the coordinatewise support function.
    pub fn row_reduced(&self, tol: &Tolerance) -> Result<Self> {
        let rows = (0..self.dims.0)
            .map(|j| self.row_polytope(j)?.pruned(tol))
            .collect::<Result<Vec<_>>>()?;
        OperatorPolytope::from_row_polytopes(&rows)
    }

    pub(crate) fn flat(&self) -> Vec<&[f64]> {
        self.generators.iter().map(|g| g.as_slice()).collect()
    }

    pub(crate) fn check_dims(&self, dims: (usize, usize), context: &'static str) -> Result<()> {
        if self.dims != dims {
            return Err(Error::DimensionMismatch {
                context,
                expected: dims,
                found: self.dims,
            });
        }
        Ok(())
    }
}
