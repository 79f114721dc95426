//! Dense two-phase simplex for the small feasibility programs used by the
//! geometry module.
//!
//! Problems are stated as
//!
//! ```text
//! minimize    c.x
//! subject to  a_eq x  = b_eq
//!             a_le x <= b_le
//!             x >= 0
//! ```
//!
//! Instances here have at most a few hundred columns, so a full tableau with
//! Bland's rule is adequate and never cycles.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-11;
const MAX_PIVOTS: usize = 50_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum RowKind {
    Eq,
    Le,
}

#[derive(Clone, Debug)]
pub(crate) struct LinearProgram {
    n_vars: usize,
    cost: Vec<f64>,
    rows: Vec<(RowKind, Vec<f64>, f64)>,
}

#[derive(Clone, Debug)]
pub(crate) enum LpOutcome {
    Optimal { x: Vec<f64>, objective: f64 },
    Infeasible,
    Unbounded,
}

impl LinearProgram {
    pub(crate) fn new(n_vars: usize) -> Self {
        LinearProgram {
            n_vars,
            cost: vec![0.0; n_vars],
            rows: Vec::new(),
        }
    }

    pub(crate) fn set_cost(&mut self, var: usize, value: f64) {
        self.cost[var] = value;
    }

    pub(crate) fn add_eq(&mut self, coeffs: Vec<f64>, rhs: f64) {
        debug_assert_eq!(coeffs.len(), self.n_vars);
        self.rows.push((RowKind::Eq, coeffs, rhs));
    }

    pub(crate) fn add_le(&mut self, coeffs: Vec<f64>, rhs: f64) {
        debug_assert_eq!(coeffs.len(), self.n_vars);
        self.rows.push((RowKind::Le, coeffs, rhs));
    }

    pub(crate) fn solve(&self) -> Result<LpOutcome> {
        let n = self.n_vars;
        let m = self.rows.len();
        let n_slack = self.rows.iter().filter(|r| r.0 == RowKind::Le).count();
        let n_struct = n + n_slack;
        let n_cols = n_struct + m;

        // Tableau rows: m constraint rows, each of width n_cols + 1 (rhs last).
        let width = n_cols + 1;
        let mut t = vec![0.0; m * width];
        let mut basis = vec![0usize; m];
        let mut slack = n;
        for (i, (kind, coeffs, rhs)) in self.rows.iter().enumerate() {
            let row = &mut t[i * width..(i + 1) * width];
            row[..n].copy_from_slice(coeffs);
            if *kind == RowKind::Le {
                row[slack] = 1.0;
                slack += 1;
            }
            row[n_cols] = *rhs;
            if *rhs < 0.0 {
                for v in row[..n_struct].iter_mut() {
                    *v = -*v;
                }
                row[n_cols] = -*rhs;
            }
            row[n_struct + i] = 1.0;
            basis[i] = n_struct + i;
        }

        let mut tab = Tableau {
            t,
            width,
            m,
            n_cols,
            basis,
        };

        // Phase one: minimize the sum of artificials.
        let mut phase1 = vec![0.0; n_cols];
        for c in phase1[n_struct..].iter_mut() {
            *c = 1.0;
        }
        tab.run(&phase1, n_cols)?;
        let infeasibility: f64 = (0..m)
            .filter(|&i| tab.basis[i] >= n_struct)
            .map(|i| tab.rhs(i))
            .sum();
        let scale = self
            .rows
            .iter()
            .map(|r| libm::fabs(r.2))
            .fold(1.0, f64::max);
        if infeasibility > 1e-9 * scale {
            return Ok(LpOutcome::Infeasible);
        }

        // Pivot remaining (zero-valued) artificials out where possible.
        for i in 0..m {
            if tab.basis[i] >= n_struct {
                if let Some(j) = (0..n_struct).find(|&j| libm::fabs(tab.at(i, j)) > PIVOT_TOL) {
                    tab.pivot(i, j);
                }
            }
        }

        // Phase two on the structural columns only.
        let mut phase2 = vec![0.0; n_cols];
        phase2[..n].copy_from_slice(&self.cost);
        match tab.run(&phase2, n_struct)? {
            Progress::Optimal => {}
            Progress::Unbounded => return Ok(LpOutcome::Unbounded),
        }

        let mut x = vec![0.0; n];
        for i in 0..m {
            if tab.basis[i] < n {
                x[tab.basis[i]] = tab.rhs(i);
            }
        }
        let objective = x.iter().zip(&self.cost).map(|(a, b)| a * b).sum();
        Ok(LpOutcome::Optimal { x, objective })
    }
}

enum Progress {
    Optimal,
    Unbounded,
}

struct Tableau {
    t: Vec<f64>,
    width: usize,
    m: usize,
    n_cols: usize,
    basis: Vec<usize>,
}

impl Tableau {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.width + j]
    }

    #[inline]
    fn rhs(&self, i: usize) -> f64 {
        self.t[i * self.width + self.n_cols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let p = self.t[r * w + c];
        for v in self.t[r * w..(r + 1) * w].iter_mut() {
            *v /= p;
        }
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.t[i * w + c];
            if f == 0.0 {
                continue;
            }
            for j in 0..w {
                let delta = f * self.t[r * w + j];
                self.t[i * w + j] -= delta;
            }
            self.t[i * w + c] = 0.0;
        }
        self.basis[r] = c;
    }

    /// Runs primal simplex with Bland's rule; only columns `< allowed` may enter.
    fn run(&mut self, cost: &[f64], allowed: usize) -> Result<Progress> {
        for _ in 0..MAX_PIVOTS {
            let mut entering = None;
            for j in 0..allowed {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut reduced = cost[j];
                for i in 0..self.m {
                    reduced -= cost[self.basis[i]] * self.at(i, j);
                }
                if reduced < -COST_TOL {
                    entering = Some(j);
                    break;
                }
            }
            let Some(c) = entering else {
                return Ok(Progress::Optimal);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let a = self.at(i, c);
                if a > PIVOT_TOL {
                    let ratio = self.rhs(i) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((k, best)) => {
                            if ratio < best - 1e-14
                                || (ratio <= best + 1e-14 && self.basis[i] < self.basis[k])
                            {
                                Some((i, ratio))
                            } else {
                                Some((k, best))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = leave else {
                return Ok(Progress::Unbounded);
            };
            self.pivot(r, c);
        }
        Err(Error::Numerical("simplex pivot budget exhausted"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn optimal(lp: &LinearProgram) -> (Vec<f64>, f64) {
        match lp.solve().unwrap() {
            LpOutcome::Optimal { x, objective } => (x, objective),
            other => panic!("expected optimum, got {:?}", other),
        }
    }

    #[test]
    fn textbook_maximization() {
        // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18  -> (2, 6), 36
        let mut lp = LinearProgram::new(2);
        lp.set_cost(0, -3.0);
        lp.set_cost(1, -5.0);
        lp.add_le(vec![1.0, 0.0], 4.0);
        lp.add_le(vec![0.0, 2.0], 12.0);
        lp.add_le(vec![3.0, 2.0], 18.0);
        let (x, obj) = optimal(&lp);
        assert!((x[0] - 2.0).abs() < 1e-12);
        assert!((x[1] - 6.0).abs() < 1e-12);
        assert!((obj + 36.0).abs() < 1e-12);
    }

    #[test]
    fn negative_rhs_and_equalities() {
        // min x + y s.t. x + y = 1, -x <= -0.25
        let mut lp = LinearProgram::new(2);
        lp.set_cost(0, 1.0);
        lp.set_cost(1, 1.0);
        lp.add_eq(vec![1.0, 1.0], 1.0);
        lp.add_le(vec![-1.0, 0.0], -0.25);
        let (x, obj) = optimal(&lp);
        assert!(x[0] >= 0.25 - 1e-12);
        assert!((obj - 1.0).abs() < 1e-12);
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(1);
        lp.add_eq(vec![1.0], -1.0);
        assert!(matches!(lp.solve().unwrap(), LpOutcome::Infeasible));

        let mut lp = LinearProgram::new(2);
        lp.set_cost(0, -1.0);
        lp.add_le(vec![-1.0, 1.0], 1.0);
        assert!(matches!(lp.solve().unwrap(), LpOutcome::Unbounded));
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(2);
        lp.set_cost(0, 1.0);
        lp.add_eq(vec![1.0, 1.0], 2.0);
        lp.add_eq(vec![2.0, 2.0], 4.0);
        let (x, obj) = optimal(&lp);
        assert!(obj.abs() < 1e-12);
        assert!((x[1] - 2.0).abs() < 1e-12);
    }
}
