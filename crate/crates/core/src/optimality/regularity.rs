//! Advisory check that the composed subd and supd sets of the constraints stay
//! apart under every sampled operator `T` and coordinate mask.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::Tolerance;
use crate::lp::{LinearProgram, LpOutcome};
use crate::qd::BandMask;

use super::Constraint;

#[derive(Clone, Debug, PartialEq)]
pub struct RegularityEntry {
    /// Index into the `T` sample.
    pub operator: usize,
    pub mask: BandMask,
    /// Whether `π T ∘ supd g` and `π T ∘ subd g` meet.
    pub intersects: bool,
    /// Max-norm gap between the two sets found by the LP.
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegularityReport {
    /// True when no sampled pair intersects.
    pub regular: bool,
    pub entries: Vec<RegularityEntry>,
}

/// For each sampled `T` (an `l x k` matrix given by rows, `k` = number of
/// constraints) and each mask over its `l` rows, tests whether
/// `π T ∘ conv(supd g)` and `π T ∘ conv(subd g)` intersect.
///
/// Defaults: `T` is the identity on `R^k`; masks are the single coordinates
/// of `R^l`. Disjointness on every single coordinate implies it on every
/// nonzero mask, so the default masks decide regularity for the sample.
pub fn quasiregularity_diagnostic(
    constraints: &[Constraint],
    operators: Option<&[Vec<Vec<f64>>]>,
    masks: Option<&[BandMask]>,
    tol: &Tolerance,
) -> Result<RegularityReport> {
    let k = constraints.len();
    if k == 0 {
        return Ok(RegularityReport {
            regular: true,
            entries: Vec::new(),
        });
    }
    let n = constraints[0].qd.dims().1;
    for c in constraints {
        if c.qd.dims() != (1, n) {
            return Err(Error::DimensionMismatch {
                context: "quasiregularity_diagnostic",
                expected: (1, n),
                found: c.qd.dims(),
            });
        }
    }
    let identity: Vec<Vec<Vec<f64>>> = vec![(0..k)
        .map(|i| {
            let mut r = vec![0.0; k];
            r[i] = 1.0;
            r
        })
        .collect()];
    let operators = operators.unwrap_or(&identity);
    let mut entries = Vec::new();
    for (oi, t) in operators.iter().enumerate() {
        let l = t.len();
        if l == 0 || t.iter().any(|r| r.len() != k) {
            return Err(Error::DimensionMismatch {
                context: "quasiregularity operator",
                expected: (l.max(1), k),
                found: (l, t.first().map_or(0, |r| r.len())),
            });
        }
        let singles: Vec<BandMask> = (0..l).map(|r| BandMask::coordinate(l, r)).collect();
        let masks = masks.unwrap_or(&singles);
        for mask in masks {
            if mask.len() != l {
                return Err(Error::DimensionMismatch {
                    context: "quasiregularity mask",
                    expected: (l, 1),
                    found: (mask.len(), 1),
                });
            }
            if mask.is_zero() {
                continue;
            }
            let gap = composed_gap(constraints, t, mask, n)?;
            entries.push(RegularityEntry {
                operator: oi,
                mask: mask.clone(),
                intersects: gap <= tol.eps_geom,
                gap,
            });
        }
    }
    Ok(RegularityReport {
        regular: entries.iter().all(|e| !e.intersects),
        entries,
    })
}

/// `min max-norm (Σ_i T_ri (a_i - b_i))` over masked rows `r`, with `a_i` in
/// `conv(subd g_i)` and `b_i` in `conv(supd g_i)`.
fn composed_gap(constraints: &[Constraint], t: &[Vec<f64>], mask: &BandMask, n: usize) -> Result<f64> {
    let mut offsets = Vec::with_capacity(constraints.len());
    let mut n_vars = 0;
    for c in constraints {
        offsets.push(n_vars);
        n_vars += c.qd.subd().len() + c.qd.supd().len();
    }
    let gap = n_vars;
    n_vars += 1;
    let mut lp = LinearProgram::new(n_vars);
    lp.set_cost(gap, 1.0);
    for (c, &off) in constraints.iter().zip(&offsets) {
        let a = c.qd.subd().len();
        let b = c.qd.supd().len();
        let mut row = vec![0.0; n_vars];
        row[off..off + a].iter_mut().for_each(|v| *v = 1.0);
        lp.add_eq(row, 1.0);
        let mut row = vec![0.0; n_vars];
        row[off + a..off + a + b].iter_mut().for_each(|v| *v = 1.0);
        lp.add_eq(row, 1.0);
    }
    for r in mask.coordinates() {
        for col in 0..n {
            let mut up = vec![0.0; n_vars];
            for ((c, &off), tri) in constraints.iter().zip(&offsets).zip(&t[r]) {
                let a = c.qd.subd().len();
                for (l, g) in c.qd.subd().generators().iter().enumerate() {
                    up[off + l] = tri * g.get(0, col);
                }
                for (l, g) in c.qd.supd().generators().iter().enumerate() {
                    up[off + a + l] = -tri * g.get(0, col);
                }
            }
            let mut down: Vec<f64> = up.iter().map(|v| -v).collect();
            up[gap] = -1.0;
            down[gap] = -1.0;
            lp.add_le(up, 0.0);
            lp.add_le(down, 0.0);
        }
    }
    match lp.solve()? {
        LpOutcome::Optimal { objective, .. } => Ok(objective.max(0.0)),
        _ => Err(Error::Numerical("regularity program has no optimum")),
    }
}
