//! Necessary optimality conditions for vector programs in `R^m`, checked
//! coordinate by coordinate.
//!
//! Every check reduces to LP membership tests of the form
//!
//! ```text
//! s ∈ conv(subd f_j) + Σ_i cone(conv(subd g_i) - S_i) + N
//! ```
//!
//! for each generator `s` of the supd row `j` and each choice of generators
//! `S_i` of the contributing constraints. A failed test yields a witness
//! direction along which the linearized program still descends.

mod regularity;

use alloc::vec;
use alloc::vec::Vec;

pub use regularity::{quasiregularity_diagnostic, RegularityEntry, RegularityReport};

use crate::error::{Error, Result};
use crate::geometry::hull::{closest_combination, separating_direction};
use crate::geometry::{nearest_point, vector_polar, DirectionCone, LinOp, OperatorPolytope, Tolerance};
use crate::qd::{active_sets, Extremum, QuasiDiff};

/// Cap on the number of `(s, S)` generator tuples examined for one coordinate.
pub const MAX_GENERATOR_TUPLES: usize = 1 << 16;

/// Counterexample to a necessary condition.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    /// Coordinate `j` of `R^m` where the condition breaks.
    pub coordinate: usize,
    /// Point index for multi-point checks.
    pub point: Option<usize>,
    /// The offending generator of the supd row `j`.
    pub generator: Vec<f64>,
    /// Unit direction `h` with `f'(x0) h` negative in coordinate `j`.
    pub direction: Vec<f64>,
    /// `f'(x0) h`, all coordinates.
    pub derivative: Vec<f64>,
}

/// Multipliers solving one membership test.
#[derive(Clone, Debug, PartialEq)]
pub struct CertificateEntry {
    pub coordinate: usize,
    pub point: Option<usize>,
    /// The supd generator `s` being certified.
    pub generator: Vec<f64>,
    /// Convex weights over the (pruned) subd row generators.
    pub weights: Vec<f64>,
    /// `γ_j`, one entry per constraint; zero off the contributing set.
    pub gamma: Vec<f64>,
    /// Normal-cone element `λ_j ∈ R^n`.
    pub lambda: Vec<f64>,
    /// Max-norm residual of the reconstruction.
    pub residual: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MultiplierCertificate {
    pub entries: Vec<CertificateEntry>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub holds: bool,
    pub witness: Option<Witness>,
    pub certificate: Option<MultiplierCertificate>,
}

impl Verdict {
    fn from_rows(outcome: core::result::Result<Vec<CertificateEntry>, Witness>) -> Verdict {
        match outcome {
            Ok(entries) => Verdict {
                holds: true,
                witness: None,
                certificate: Some(MultiplierCertificate { entries }),
            },
            Err(w) => Verdict {
                holds: false,
                witness: Some(w),
                certificate: None,
            },
        }
    }
}

/// A scalar constraint `g(x) <= 0` given by its quasidifferential and value at
/// the base point.
#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub qd: QuasiDiff,
    pub value: f64,
}

impl Constraint {
    pub fn new(qd: QuasiDiff, value: f64) -> Result<Self> {
        if qd.dims().0 != 1 {
            return Err(Error::NotScalar { m: qd.dims().0 });
        }
        if !value.is_finite() {
            return Err(Error::NonFinite("constraint value"));
        }
        Ok(Constraint { qd, value })
    }
}

/// Constraints `g_i(x) <= 0` together with an optional cone `K` of feasible
/// directions of the set constraint `C` at the base point.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConstraintSystem {
    pub constraints: Vec<Constraint>,
    pub set_cone: Option<DirectionCone>,
}

impl ConstraintSystem {
    pub fn new(constraints: Vec<Constraint>, set_cone: Option<DirectionCone>) -> Self {
        ConstraintSystem { constraints, set_cone }
    }

    /// Splits a vector constraint `g: R^n -> R^k` into its `k` rows.
    pub fn from_vector(qd: &QuasiDiff, values: &[f64]) -> Result<Self> {
        if values.len() != qd.dims().0 {
            return Err(Error::DimensionMismatch {
                context: "ConstraintSystem::from_vector",
                expected: (qd.dims().0, 1),
                found: (values.len(), 1),
            });
        }
        let constraints = values
            .iter()
            .enumerate()
            .map(|(i, v)| Constraint::new(qd.row(i)?, *v))
            .collect::<Result<Vec<_>>>()?;
        Ok(ConstraintSystem {
            constraints,
            set_cone: None,
        })
    }

    pub fn with_set_cone(mut self, k: DirectionCone) -> Self {
        self.set_cone = Some(k);
        self
    }

    /// Indices with `|g_i(x0)| <= eps_active`.
    pub fn active(&self, eps_active: f64) -> Vec<usize> {
        self.constraints
            .iter()
            .enumerate()
            .filter(|(_, c)| libm::fabs(c.value) <= eps_active)
            .map(|(i, _)| i)
            .collect()
    }

    fn check_feasible(&self, tol: &Tolerance) -> Result<()> {
        for (i, c) in self.constraints.iter().enumerate() {
            if c.value > tol.eps_active {
                return Err(Error::Infeasible {
                    constraint: i,
                    value: c.value,
                });
            }
        }
        Ok(())
    }
}

/// Unconstrained condition `supd ⊆ subd`, row by row.
pub fn check_unconstrained(q: &QuasiDiff, tol: &Tolerance) -> Result<Verdict> {
    let (m, _) = q.dims();
    let mut entries = Vec::new();
    for j in 0..m {
        match check_row(q, j, None, &[], &[], 0, tol)? {
            Ok(mut e) => entries.append(&mut e),
            Err(w) => return Ok(Verdict::from_rows(Err(w))),
        }
    }
    Ok(Verdict::from_rows(Ok(entries)))
}

/// Inequality constraints with complementary slackness: only active
/// constraints contribute a cone. `cs.set_cone` is ignored here.
pub fn check_inequality_constrained(qf: &QuasiDiff, cs: &ConstraintSystem, tol: &Tolerance) -> Result<Verdict> {
    cs.check_feasible(tol)?;
    let active = cs.active(tol.eps_active);
    run_rows(qf, cs, &active, &[], tol)
}

/// Set constraint with feasible-direction cone `k`: `supd ⊆ subd + N`.
pub fn check_set_constrained(qf: &QuasiDiff, k: &DirectionCone, tol: &Tolerance) -> Result<Verdict> {
    let normal = normal_rays(qf, k, tol)?;
    run_rows(qf, &ConstraintSystem::default(), &[], &normal, tol)
}

/// Active inequality constraints and the set cone together.
pub fn check_combined(qf: &QuasiDiff, cs: &ConstraintSystem, tol: &Tolerance) -> Result<Verdict> {
    cs.check_feasible(tol)?;
    let active = cs.active(tol.eps_active);
    let normal = match &cs.set_cone {
        Some(k) => normal_rays(qf, k, tol)?,
        None => Vec::new(),
    };
    run_rows(qf, cs, &active, &normal, tol)
}

/// Scalar condition with every constraint contributing its cone, active or
/// not.
pub fn check_slackened(qf: &QuasiDiff, constraints: &[Constraint], tol: &Tolerance) -> Result<Verdict> {
    if qf.dims().0 != 1 {
        return Err(Error::NotScalar { m: qf.dims().0 });
    }
    let cs = ConstraintSystem::new(constraints.to_vec(), None);
    let all: Vec<usize> = (0..constraints.len()).collect();
    run_rows(qf, &cs, &all, &[], tol)
}

/// One point of a multi-point program.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralizedPoint {
    pub qd: QuasiDiff,
    pub value: Vec<f64>,
    /// Feasible-direction cone at the point; `None` means unconstrained.
    pub cone: Option<DirectionCone>,
}

/// Multi-point condition: for every coordinate `j` and every point `k`
/// attaining the coordinatewise minimum there, row `j` of `supd_k` must lie in
/// row `j` of `subd_k + N_k`. These `(j, k)` pairs are exactly the masked rows
/// of the extreme weight systems.
pub fn check_generalized(points: &[GeneralizedPoint], tol: &Tolerance) -> Result<Verdict> {
    let first = points.first().ok_or(Error::Empty("generalized points"))?;
    let dims = first.qd.dims();
    for p in points {
        if p.qd.dims() != dims {
            return Err(Error::DimensionMismatch {
                context: "check_generalized",
                expected: dims,
                found: p.qd.dims(),
            });
        }
        if p.value.len() != dims.0 {
            return Err(Error::DimensionMismatch {
                context: "check_generalized value",
                expected: (dims.0, 1),
                found: (p.value.len(), 1),
            });
        }
    }
    let values: Vec<Vec<f64>> = points.iter().map(|p| p.value.clone()).collect();
    let sets = active_sets(&values, Extremum::Min, tol.eps_active)?;
    let normals = points
        .iter()
        .map(|p| match &p.cone {
            Some(k) => normal_rays(&p.qd, k, tol),
            None => Ok(Vec::new()),
        })
        .collect::<Result<Vec<_>>>()?;
    let mut entries = Vec::new();
    for (j, set) in sets.iter().enumerate() {
        for &k in set {
            match check_row(&points[k].qd, j, Some(k), &[], &normals[k], 0, tol)? {
                Ok(mut e) => entries.append(&mut e),
                Err(w) => return Ok(Verdict::from_rows(Err(w))),
            }
        }
    }
    Ok(Verdict::from_rows(Ok(entries)))
}

fn normal_rays(q: &QuasiDiff, k: &DirectionCone, tol: &Tolerance) -> Result<Vec<Vec<f64>>> {
    if k.dim() != q.dims().1 {
        return Err(Error::DimensionMismatch {
            context: "set cone",
            expected: (q.dims().1, 1),
            found: (k.dim(), 1),
        });
    }
    vector_polar(k, tol)
}

fn run_rows(
    qf: &QuasiDiff,
    cs: &ConstraintSystem,
    contributing: &[usize],
    normal: &[Vec<f64>],
    tol: &Tolerance,
) -> Result<Verdict> {
    let (m, n) = qf.dims();
    let mut rows = Vec::with_capacity(contributing.len());
    for &i in contributing {
        let c = &cs.constraints[i];
        if c.qd.dims() != (1, n) {
            return Err(Error::DimensionMismatch {
                context: "constraint quasidifferential",
                expected: (1, n),
                found: c.qd.dims(),
            });
        }
        rows.push(ConstraintRows {
            index: i,
            subd: row_vectors(c.qd.subd(), 0, tol)?,
            supd: row_vectors(c.qd.supd(), 0, tol)?,
        });
    }
    let mut entries = Vec::new();
    for j in 0..m {
        match check_row(qf, j, None, &rows, normal, cs.constraints.len(), tol)? {
            Ok(mut e) => entries.append(&mut e),
            Err(w) => return Ok(Verdict::from_rows(Err(w))),
        }
    }
    Ok(Verdict::from_rows(Ok(entries)))
}

struct ConstraintRows {
    index: usize,
    subd: Vec<Vec<f64>>,
    supd: Vec<Vec<f64>>,
}

fn row_vectors(p: &OperatorPolytope, j: usize, tol: &Tolerance) -> Result<Vec<Vec<f64>>> {
    Ok(p.row_polytope(j)?
        .pruned(tol)?
        .generators()
        .iter()
        .map(|g| g.as_slice().to_vec())
        .collect())
}

type RowOutcome = core::result::Result<Vec<CertificateEntry>, Witness>;

/// Runs every `(s, S)` membership test for coordinate `j` of `q`.
fn check_row(
    q: &QuasiDiff,
    j: usize,
    point: Option<usize>,
    cons: &[ConstraintRows],
    normal: &[Vec<f64>],
    n_constraints: usize,
    tol: &Tolerance,
) -> Result<RowOutcome> {
    let n = q.dims().1;
    let hull = row_vectors(q.subd(), j, tol)?;
    let targets = row_vectors(q.supd(), j, tol)?;
    let mut total = targets.len();
    for c in cons {
        total = total.saturating_mul(c.supd.len());
    }
    if total > MAX_GENERATOR_TUPLES {
        return Err(Error::UnsupportedDimension {
            context: "generator tuples per coordinate",
            dim: total,
            limit: MAX_GENERATOR_TUPLES,
        });
    }
    let hull_refs: Vec<&[f64]> = hull.iter().map(|v| v.as_slice()).collect();
    let mut entries = Vec::new();
    let mut tuple = vec![0usize; cons.len()];
    for s in &targets {
        loop {
            let mut rays: Vec<Vec<f64>> = Vec::new();
            let mut owner: Vec<Option<usize>> = Vec::new();
            for (c, &pick) in cons.iter().zip(&tuple) {
                let big_s = &c.supd[pick];
                for v in &c.subd {
                    rays.push(v.iter().zip(big_s).map(|(a, b)| a - b).collect());
                    owner.push(Some(c.index));
                }
            }
            for r in normal {
                rays.push(r.clone());
                owner.push(None);
            }
            let ray_refs: Vec<&[f64]> = rays.iter().map(|v| v.as_slice()).collect();
            let comb = closest_combination(s, &hull_refs, &ray_refs)?;
            if comb.residual > tol.eps_geom {
                let witness = if cons.is_empty() && normal.is_empty() {
                    nearest_witness(q, j, point, &hull, s, tol)?
                } else {
                    let (h, _) = separating_direction(s, &hull_refs, &ray_refs)?;
                    witness(q, j, point, s, h)?
                };
                return Ok(Err(witness));
            }
            let mut gamma = vec![0.0; n_constraints];
            let mut lambda = vec![0.0; n];
            for ((coef, who), ray) in comb.coeffs.iter().zip(&owner).zip(&rays) {
                match who {
                    Some(i) => gamma[*i] += coef,
                    None => {
                        for (l, r) in lambda.iter_mut().zip(ray) {
                            *l += coef * r;
                        }
                    }
                }
            }
            entries.push(CertificateEntry {
                coordinate: j,
                point,
                generator: s.clone(),
                weights: comb.weights,
                gamma,
                lambda,
                residual: comb.residual,
            });
            if !advance(&mut tuple, cons) {
                break;
            }
        }
    }
    Ok(Ok(entries))
}

/// Odometer step over the supd generators of the contributing constraints.
fn advance(tuple: &mut [usize], cons: &[ConstraintRows]) -> bool {
    for (t, c) in tuple.iter_mut().zip(cons) {
        *t += 1;
        if *t < c.supd.len() {
            return true;
        }
        *t = 0;
    }
    false
}

/// `h = (s - p) / |s - p|` for the nearest point `p` of the subd row to `s`,
/// so that `f'_j(x0) h <= -|s - p|`.
fn nearest_witness(
    q: &QuasiDiff,
    j: usize,
    point: Option<usize>,
    hull: &[Vec<f64>],
    s: &[f64],
    tol: &Tolerance,
) -> Result<Witness> {
    let rows = hull.iter().map(|v| LinOp::row_vector(v)).collect::<Result<Vec<_>>>()?;
    let near = nearest_point(&OperatorPolytope::new(rows)?, &LinOp::row_vector(s)?, tol)?;
    let h: Vec<f64> = s.iter().zip(near.point.as_slice()).map(|(a, b)| a - b).collect();
    witness(q, j, point, s, h)
}

fn witness(q: &QuasiDiff, j: usize, point: Option<usize>, s: &[f64], h: Vec<f64>) -> Result<Witness> {
    let norm = libm::sqrt(h.iter().map(|v| v * v).sum());
    let direction: Vec<f64> = if norm > 0.0 { h.iter().map(|v| v / norm).collect() } else { h };
    let derivative = q.eval_dir(&direction)?;
    Ok(Witness {
        coordinate: j,
        point,
        generator: s.to_vec(),
        direction,
        derivative,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qd::qd_linear;

    fn s(v: f64) -> LinOp {
        LinOp::new(1, 1, vec![v]).unwrap()
    }

    fn lin(v: f64) -> QuasiDiff {
        qd_linear(&s(v))
    }

    fn qd(sub: &[[f64; 2]], sup: &[[f64; 2]]) -> QuasiDiff {
        QuasiDiff::new(
            OperatorPolytope::from_row_vectors(sub).unwrap(),
            OperatorPolytope::from_row_vectors(sup).unwrap(),
        )
        .unwrap()
    }

    fn abs_qd() -> QuasiDiff {
        QuasiDiff::new(OperatorPolytope::interval(-1.0, 1.0).unwrap(), OperatorPolytope::zero(1, 1)).unwrap()
    }

    fn half_line() -> DirectionCone {
        DirectionCone::orthant(1)
    }

    #[test]
    fn sum_of_abs_holds() {
        let q = qd(&[[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]], &[[0.0, 0.0]]);
        let v = check_unconstrained(&q, &Tolerance::default()).unwrap();
        assert!(v.holds && v.witness.is_none());
    }

    #[test]
    fn saddle_fails_with_descent_witness() {
        let q = qd(&[[1.0, 0.0], [-1.0, 0.0]], &[[0.0, 1.0], [0.0, -1.0]]);
        let v = check_unconstrained(&q, &Tolerance::default()).unwrap();
        assert!(!v.holds);
        let w = v.witness.unwrap();
        assert_eq!(w.generator, vec![0.0, 1.0]);
        assert!((w.direction[0]).abs() < 1e-12 && (w.direction[1] - 1.0).abs() < 1e-12);
        assert!((w.derivative[0] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn nonzero_linear_fails() {
        let v = check_unconstrained(&lin(2.0), &Tolerance::default()).unwrap();
        assert!(!v.holds);
        let w = v.witness.unwrap();
        assert_eq!(w.direction, vec![-1.0]);
        assert_eq!(w.derivative, vec![-2.0]);
    }

    #[test]
    fn active_constraint_certificate() {
        let cs = ConstraintSystem::new(vec![Constraint::new(lin(-1.0), 0.0).unwrap()], None);
        let v = check_inequality_constrained(&lin(1.0), &cs, &Tolerance::default()).unwrap();
        assert!(v.holds);
        let e = &v.certificate.unwrap().entries[0];
        assert!((e.gamma[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn inactive_constraint_drops_out() {
        let cs = ConstraintSystem::new(vec![Constraint::new(lin(1.0), -1.0).unwrap()], None);
        let v = check_inequality_constrained(&lin(1.0), &cs, &Tolerance::default()).unwrap();
        assert!(!v.holds);
        assert!(v.witness.unwrap().derivative[0] < 0.0);
    }

    #[test]
    fn vacuous_constraint_matches_unconstrained() {
        let cs = ConstraintSystem::new(vec![Constraint::new(lin(0.0), -1.0).unwrap()], None);
        let v = check_inequality_constrained(&abs_qd(), &cs, &Tolerance::default()).unwrap();
        assert!(v.holds);
        let e = &v.certificate.unwrap().entries[0];
        assert_eq!(e.gamma, vec![0.0]);
        assert!((e.weights[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn infeasible_point_is_rejected() {
        let cs = ConstraintSystem::new(vec![Constraint::new(lin(1.0), 0.5).unwrap()], None);
        assert!(matches!(
            check_inequality_constrained(&lin(1.0), &cs, &Tolerance::default()),
            Err(Error::Infeasible { constraint: 0, .. })
        ));
    }

    #[test]
    fn half_line_set_constraint() {
        let t = Tolerance::default();
        let v = check_set_constrained(&lin(1.0), &half_line(), &t).unwrap();
        assert!(v.holds);
        assert!((v.certificate.unwrap().entries[0].lambda[0] + 1.0).abs() < 1e-12);
        let v = check_set_constrained(&lin(-1.0), &half_line(), &t).unwrap();
        assert!(!v.holds);
        let w = v.witness.unwrap();
        assert!(w.direction[0] > 0.0 && w.derivative[0] < 0.0);
    }

    #[test]
    fn trivial_cone_always_holds() {
        let k = DirectionCone::new(2, vec![]).unwrap();
        let q = qd(&[[3.0, -1.0]], &[[0.0, 5.0], [1.0, 1.0]]);
        assert!(check_set_constrained(&q, &k, &Tolerance::default()).unwrap().holds);
    }

    #[test]
    fn combined_fixture_has_valid_certificate() {
        let cs = ConstraintSystem::new(vec![Constraint::new(lin(-1.0), 0.0).unwrap()], Some(half_line()));
        let v = check_combined(&lin(1.0), &cs, &Tolerance::default()).unwrap();
        assert!(v.holds);
        let e = &v.certificate.unwrap().entries[0];
        // 0 = 1 + γ (-1 - 0) + λ
        assert!((1.0 - e.gamma[0] + e.lambda[0]).abs() < 1e-12);
        assert!(e.gamma[0] >= 0.0 && e.lambda[0] <= 0.0);
    }

    #[test]
    fn combined_degenerates() {
        let t = Tolerance::default();
        let f = lin(-1.0);
        let only_set = ConstraintSystem::new(vec![], Some(half_line()));
        assert_eq!(
            check_combined(&f, &only_set, &t).unwrap().holds,
            check_set_constrained(&f, &half_line(), &t).unwrap().holds
        );
        let g = vec![Constraint::new(lin(-1.0), 0.0).unwrap()];
        let whole = ConstraintSystem::new(g.clone(), Some(DirectionCone::whole_space(1)));
        assert_eq!(
            check_combined(&lin(1.0), &whole, &t).unwrap().holds,
            check_inequality_constrained(&lin(1.0), &ConstraintSystem::new(g, None), &t).unwrap().holds
        );
    }

    #[test]
    fn slackened_uses_every_constraint() {
        let t = Tolerance::default();
        let c = vec![Constraint::new(lin(-1.0), -3.0).unwrap()];
        assert!(check_slackened(&lin(1.0), &c, &t).unwrap().holds);
        assert!(!check_slackened(&lin(1.0), &[], &t).unwrap().holds);
        let two = QuasiDiff::new(OperatorPolytope::zero(2, 1), OperatorPolytope::zero(2, 1)).unwrap();
        assert!(matches!(check_slackened(&two, &c, &t), Err(Error::NotScalar { m: 2 })));
    }

    #[test]
    fn two_point_generalized_optimum() {
        // f(x) = (|x - 1|, |x + 1|) at x = 1 and x = -1
        let row = |a: f64, b: f64| LinOp::new(2, 1, vec![a, b]).unwrap();
        let at = |sub: Vec<LinOp>| QuasiDiff::new(OperatorPolytope::new(sub).unwrap(), OperatorPolytope::zero(2, 1)).unwrap();
        let p1 = GeneralizedPoint {
            qd: at(vec![row(-1.0, 1.0), row(1.0, 1.0)]),
            value: vec![0.0, 2.0],
            cone: None,
        };
        let p2 = GeneralizedPoint {
            qd: at(vec![row(1.0, -1.0), row(1.0, 1.0)]),
            value: vec![2.0, 0.0],
            cone: None,
        };
        let v = check_generalized(&[p1, p2], &Tolerance::default()).unwrap();
        assert!(v.holds);
        let cert = v.certificate.unwrap();
        assert_eq!(cert.entries.len(), 2);
        assert_eq!((cert.entries[0].coordinate, cert.entries[0].point), (0, Some(0)));
        assert_eq!((cert.entries[1].coordinate, cert.entries[1].point), (1, Some(1)));
    }

    #[test]
    fn single_point_generalized_is_unconstrained() {
        let q = qd(&[[1.0, 0.0], [-1.0, 0.0]], &[[0.0, 1.0], [0.0, -1.0]]);
        let p = GeneralizedPoint {
            qd: q.clone(),
            value: vec![0.0],
            cone: None,
        };
        let t = Tolerance::default();
        assert_eq!(
            check_generalized(&[p], &t).unwrap().holds,
            check_unconstrained(&q, &t).unwrap().holds
        );
    }
}
