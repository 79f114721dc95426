use alloc::vec::Vec;

use crate::error::{Error, Result};

use super::linop::LinOp;

/// Finitely generated convex cone of `m x n` operators. No generators means
/// the trivial cone `{0}`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyCone {
    dims: (usize, usize),
    generators: Vec<LinOp>,
}

impl PolyCone {
    pub fn new(dims: (usize, usize), generators: Vec<LinOp>) -> Result<Self> {
        if dims.0 == 0 || dims.1 == 0 {
            return Err(Error::Empty("cone dimensions"));
        }
        for g in &generators {
            g.check_dims(dims, "PolyCone::new")?;
        }
        Ok(PolyCone { dims, generators })
    }

    pub fn trivial(dims: (usize, usize)) -> Self {
        PolyCone {
            dims,
            generators: Vec::new(),
        }
    }

    /// `1 x n` cone generated by the given row vectors.
    pub fn from_row_vectors<R: AsRef<[f64]>>(n: usize, rows: &[R]) -> Result<Self> {
        let gens = rows
            .iter()
            .map(|r| LinOp::row_vector(r.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        PolyCone::new((1, n), gens)
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    #[inline]
    pub fn generators(&self) -> &[LinOp] {
        &self.generators
    }

    pub fn is_trivial(&self) -> bool {
        self.generators.is_empty()
    }

    pub(crate) fn flat(&self) -> Vec<&[f64]> {
        self.generators.iter().map(|g| g.as_slice()).collect()
    }
}

/// Convex cone of directions in `R^n`, e.g. a cone `K` of feasible directions
/// of a constraint set at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectionCone {
    dim: usize,
    generators: Vec<Vec<f64>>,
}

impl DirectionCone {
    pub fn new(dim: usize, generators: Vec<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Empty("direction cone dimension"));
        }
        for g in &generators {
            if g.len() != dim {
                return Err(Error::DimensionMismatch {
                    context: "DirectionCone::new",
                    expected: (dim, 1),
                    found: (g.len(), 1),
                });
            }
            if g.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("direction cone generator"));
            }
        }
        Ok(DirectionCone { dim, generators })
    }

    /// All of `R^n`, generated by `±e_i`.
    pub fn whole_space(dim: usize) -> Self {
        let mut generators = Vec::with_capacity(2 * dim);
        for i in 0..dim {
            for s in [1.0, -1.0] {
                let mut e = alloc::vec![0.0; dim];
                e[i] = s;
                generators.push(e);
            }
        }
        DirectionCone { dim, generators }
    }

    /// The nonnegative orthant `R^n_+`.
    pub fn orthant(dim: usize) -> Self {
        let generators = (0..dim)
            .map(|i| {
                let mut e = alloc::vec![0.0; dim];
                e[i] = 1.0;
                e
            })
            .collect();
        DirectionCone { dim, generators }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn generators(&self) -> &[Vec<f64>] {
        &self.generators
    }
}
