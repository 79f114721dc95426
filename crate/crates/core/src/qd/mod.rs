//! Quasidifferentials of maps into `R^m` with the coordinatewise order, and
//! the calculus rules that propagate them.
//!
//! A [`QuasiDiff`] `[subd, supd]` represents the directional derivative
//!
//! ```text
//! f'(x0) h = support(subd, h) - support(supd, h)
//! ```
//!
//! The pair is only meaningful up to this identity: many pairs represent the
//! same derivative, so quasidifferentials are compared through support values,
//! never structurally.
//!
//! In `R^m` a support function is determined row by row: coordinate `j` of
//! `support(P, h)` only sees the convex hull of the `j`-th rows of the
//! generators. All rules therefore work on row polytopes in `R^n` and restack
//! the results with [`OperatorPolytope::from_row_polytopes`].

mod calculus;

use alloc::vec::Vec;

pub use calculus::{
    default_bounds, qd_add, qd_compose, qd_eval_dir, qd_inf, qd_linear, qd_product, qd_scale, qd_sup,
    MAX_COMPOSE_DIM,
};

use crate::error::{Error, Result};
use crate::geometry::{OperatorPolytope, Tolerance};

/// Diagonal multiplication operator on `R^m`.
#[derive(Clone, Debug, PartialEq)]
pub struct Orthomorphism {
    diag: Vec<f64>,
}

impl Orthomorphism {
    pub fn new(diag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::Empty("orthomorphism diagonal"));
        }
        if diag.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("orthomorphism diagonal"));
        }
        Ok(Orthomorphism { diag })
    }

    pub fn identity(m: usize) -> Self {
        Orthomorphism {
            diag: alloc::vec![1.0; m],
        }
    }

    pub fn uniform(m: usize, s: f64) -> Result<Self> {
        Orthomorphism::new(alloc::vec![s; m])
    }

    #[inline]
    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// `α⁺ = max(α, 0)` entrywise.
    pub fn positive_part(&self) -> Vec<f64> {
        self.diag.iter().map(|v| v.max(0.0)).collect()
    }

    /// `α⁻ = max(-α, 0)` entrywise.
    pub fn negative_part(&self) -> Vec<f64> {
        self.diag.iter().map(|v| (-v).max(0.0)).collect()
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.diag.iter().zip(v).map(|(a, b)| a * b).collect()
    }
}

impl From<&BandMask> for Orthomorphism {
    fn from(mask: &BandMask) -> Self {
        Orthomorphism {
            diag: mask.mask.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect(),
        }
    }
}

/// Band projection on `R^m`: a 0/1 coordinate mask.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BandMask {
    mask: Vec<bool>,
}

impl BandMask {
    pub fn new(mask: Vec<bool>) -> Self {
        BandMask { mask }
    }

    pub fn full(m: usize) -> Self {
        BandMask {
            mask: alloc::vec![true; m],
        }
    }

    pub fn coordinate(m: usize, j: usize) -> Self {
        let mut mask = alloc::vec![false; m];
        mask[j] = true;
        BandMask { mask }
    }

    #[inline]
    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.mask.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mask.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        !self.mask.iter().any(|&b| b)
    }

    /// Composition of projections (coordinatewise AND).
    pub fn compose(&self, other: &BandMask) -> BandMask {
        BandMask {
            mask: self.mask.iter().zip(&other.mask).map(|(a, b)| *a && *b).collect(),
        }
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.mask
            .iter()
            .zip(v)
            .map(|(&b, x)| if b { *x } else { 0.0 })
            .collect()
    }

    pub fn coordinates(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask.iter().enumerate().filter(|(_, b)| **b).map(|(j, _)| j)
    }
}

/// Quasidifferential `[subd, supd]` of a map `R^n -> R^m` at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct QuasiDiff {
    subd: OperatorPolytope,
    supd: OperatorPolytope,
}

impl QuasiDiff {
    pub fn new(subd: OperatorPolytope, supd: OperatorPolytope) -> Result<Self> {
        if subd.dims() != supd.dims() {
            return Err(Error::DimensionMismatch {
                context: "QuasiDiff::new",
                expected: subd.dims(),
                found: supd.dims(),
            });
        }
        Ok(QuasiDiff { subd, supd })
    }

    #[inline]
    pub fn subd(&self) -> &OperatorPolytope {
        &self.subd
    }

    #[inline]
    pub fn supd(&self) -> &OperatorPolytope {
        &self.supd
    }

    /// `(m, n)`.
    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        self.subd.dims()
    }

    pub fn into_parts(self) -> (OperatorPolytope, OperatorPolytope) {
        (self.subd, self.supd)
    }

    /// Quasidifferential of `-f`: the two polytopes trade places.
    pub fn negated(&self) -> QuasiDiff {
        QuasiDiff {
            subd: self.supd.clone(),
            supd: self.subd.clone(),
        }
    }

    /// Row-wise pruned representative with the same support functions.
    ///
    /// A row whose supd part is a single point `s` is shifted: the subd row
    /// becomes `subd_j - s` and the supd row becomes `{0}`.
    pub fn reduced(&self, tol: &Tolerance) -> Result<QuasiDiff> {
        let (m, n) = self.dims();
        let mut sub_rows = Vec::with_capacity(m);
        let mut sup_rows = Vec::with_capacity(m);
        for j in 0..m {
            let sub = self.subd.row_polytope(j)?.pruned(tol)?;
            let sup = self.supd.row_polytope(j)?.pruned(tol)?;
            if sup.len() == 1 {
                sub_rows.push(sub.translated(&sup.generators()[0])?);
                sup_rows.push(OperatorPolytope::zero(1, n));
            } else {
                sub_rows.push(sub);
                sup_rows.push(sup);
            }
        }
        Ok(QuasiDiff {
            subd: OperatorPolytope::from_row_polytopes(&sub_rows)?,
            supd: OperatorPolytope::from_row_polytopes(&sup_rows)?,
        })
    }

    /// Coordinate `j` as a scalar (`1 x n`) quasidifferential.
    pub fn row(&self, j: usize) -> Result<QuasiDiff> {
        Ok(QuasiDiff {
            subd: self.subd.row_polytope(j)?,
            supd: self.supd.row_polytope(j)?,
        })
    }

    pub fn eval_dir(&self, h: &[f64]) -> Result<Vec<f64>> {
        qd_eval_dir(self, h)
    }

    /// Largest support-value discrepancy against `other` over the directions.
    pub fn max_deviation(&self, other: &QuasiDiff, directions: &[Vec<f64>]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for h in directions {
            let a = self.eval_dir(h)?;
            let b = other.eval_dir(h)?;
            for (x, y) in a.iter().zip(&b) {
                worst = worst.max(libm::fabs(x - y));
            }
        }
        Ok(worst)
    }
}

/// Whether a selection picks maximizing or minimizing terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extremum {
    Max,
    Min,
}

/// Per-coordinate choice `j -> k(j)` of one active term among `f_1..f_r`.
///
/// These are the extreme points of the weight systems `(α_1..α_r)` with
/// `α_k >= 0`, `Σ α_k = I` and `Σ α_k f_k(x0) = max_k f_k(x0)` (resp. min):
/// every extreme system puts unit weight on a single active term per
/// coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ActiveWeightSelection {
    choice: Vec<usize>,
}

impl ActiveWeightSelection {
    #[inline]
    pub fn choice(&self) -> &[usize] {
        &self.choice
    }

    /// The band on which term `k` carries the weight.
    pub fn mask_of(&self, k: usize) -> BandMask {
        BandMask::new(self.choice.iter().map(|&c| c == k).collect())
    }

    /// All extreme selections for the term values `values[k][j]`.
    pub fn enumerate(values: &[Vec<f64>], sense: Extremum, eps_active: f64) -> Result<Vec<Self>> {
        let sets = active_sets(values, sense, eps_active)?;
        let mut out = alloc::vec![ActiveWeightSelection { choice: Vec::new() }];
        for set in &sets {
            let mut next = Vec::with_capacity(out.len() * set.len());
            for sel in &out {
                for &k in set {
                    let mut choice = sel.choice.clone();
                    choice.push(k);
                    next.push(ActiveWeightSelection { choice });
                }
            }
            out = next;
        }
        Ok(out)
    }
}

/// For each coordinate `j`, the indices `k` with `values[k][j]` within
/// `eps_active` of the coordinatewise max (resp. min).
pub fn active_sets(values: &[Vec<f64>], sense: Extremum, eps_active: f64) -> Result<Vec<Vec<usize>>> {
    let first = values.first().ok_or(Error::Empty("term values"))?;
    let m = first.len();
    for v in values {
        if v.len() != m {
            return Err(Error::DimensionMismatch {
                context: "active_sets",
                expected: (m, 1),
                found: (v.len(), 1),
            });
        }
    }
    Ok((0..m)
        .map(|j| {
            let best = values
                .iter()
                .map(|v| v[j])
                .fold(if sense == Extremum::Max { f64::NEG_INFINITY } else { f64::INFINITY }, |a, b| match sense {
                    Extremum::Max => a.max(b),
                    Extremum::Min => a.min(b),
                });
            (0..values.len())
                .filter(|&k| libm::fabs(values[k][j] - best) <= eps_active)
                .collect()
        })
        .collect())
}
