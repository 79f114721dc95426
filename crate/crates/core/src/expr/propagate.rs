use alloc::vec::Vec;

use crate::error::Result;
use crate::geometry::{LinOp, Tolerance};
use crate::qd::{qd_add, qd_compose, qd_inf, qd_linear, qd_product, qd_scale, qd_sup, Orthomorphism, QuasiDiff};

use super::{check_point, eval_unchecked, Expr};

/// Quasidifferential of `e` at `x`, built bottom-up from the calculus rules
/// and returned in [reduced](QuasiDiff::reduced) form.
pub fn qd_at(e: &Expr, x: &[f64], tol: &Tolerance) -> Result<QuasiDiff> {
    let d = e.dims()?;
    check_point(x, d.input)?;
    propagate(e, x, tol)?.1.reduced(tol)
}

/// Value and quasidifferential of a validated expression.
fn propagate(e: &Expr, x: &[f64], tol: &Tolerance) -> Result<(Vec<f64>, QuasiDiff)> {
    let n = x.len();
    match e {
        Expr::Var { .. } => Ok((x.to_vec(), qd_linear(&LinOp::identity(n)))),
        Expr::Coord { index, .. } => {
            let mut row = alloc::vec![0.0; n];
            row[*index] = 1.0;
            Ok((alloc::vec![x[*index]], qd_linear(&LinOp::row_vector(&row)?)))
        }
        Expr::Const { value, .. } => Ok((value.clone(), qd_linear(&LinOp::zeros(value.len(), n)))),
        Expr::Affine { a, .. } => Ok((eval_unchecked(e, x), qd_linear(a))),
        Expr::Smooth { func, arg } => {
            // (φ∘u)'(x) h = φ'(u(x)) ⊙ u'(x) h: scaling by a diagonal multiplier
            let (u, qu) = propagate(arg, x, tol)?;
            let slope = Orthomorphism::new(u.iter().map(|t| func.derivative(*t)).collect())?;
            let value = u.iter().map(|t| func.eval(*t)).collect();
            Ok((value, qd_scale(&slope, &qu, tol)?))
        }
        Expr::Abs(arg) => {
            // |u| = max(u, -u)
            let (u, qu) = propagate(arg, x, tol)?;
            let neg: Vec<f64> = u.iter().map(|t| -t).collect();
            let q = qd_sup(&[qu.clone(), qu.negated()], &[u.clone(), neg], tol)?.reduced(tol)?;
            Ok((u.iter().map(|t| libm::fabs(*t)).collect(), q))
        }
        Expr::Neg(arg) => {
            let (u, qu) = propagate(arg, x, tol)?;
            Ok((u.iter().map(|t| -t).collect(), qu.negated()))
        }
        Expr::Add(args) => {
            let (values, qds) = propagate_all(args, x, tol)?;
            let mut value = values[0].clone();
            for v in &values[1..] {
                for (s, t) in value.iter_mut().zip(v) {
                    *s += t;
                }
            }
            Ok((value, qd_add(&qds, tol)?))
        }
        Expr::ScaleConst { diag, arg } => {
            let (u, qu) = propagate(arg, x, tol)?;
            let alpha = Orthomorphism::new(diag.clone())?;
            Ok((alpha.apply(&u), qd_scale(&alpha, &qu, tol)?))
        }
        Expr::MulScalar { g, f } => {
            let (gv, qg) = propagate(g, x, tol)?;
            let (fv, qf) = propagate(f, x, tol)?;
            let q = qd_product(&qg, &gv, &qf, &fv, tol)?;
            Ok((gv.iter().zip(&fv).map(|(a, b)| a * b).collect(), q))
        }
        Expr::Max(args) => {
            let (values, qds) = propagate_all(args, x, tol)?;
            let q = qd_sup(&qds, &values, tol)?.reduced(tol)?;
            Ok((lattice(&values, f64::max), q))
        }
        Expr::Min(args) => {
            let (values, qds) = propagate_all(args, x, tol)?;
            let q = qd_inf(&qds, &values, tol)?.reduced(tol)?;
            Ok((lattice(&values, f64::min), q))
        }
        Expr::Compose { outer, inner } => {
            let (u, qu) = propagate(inner, x, tol)?;
            let (v, qv) = propagate(outer, &u, tol)?;
            Ok((v, qd_compose(&qv, &qu, None, tol)?.reduced(tol)?))
        }
    }
}

fn propagate_all(args: &[Expr], x: &[f64], tol: &Tolerance) -> Result<(Vec<Vec<f64>>, Vec<QuasiDiff>)> {
    let mut values = Vec::with_capacity(args.len());
    let mut qds = Vec::with_capacity(args.len());
    for a in args {
        let (v, q) = propagate(a, x, tol)?;
        values.push(v);
        qds.push(q);
    }
    Ok((values, qds))
}

fn lattice(values: &[Vec<f64>], op: fn(f64, f64) -> f64) -> Vec<f64> {
    let mut acc = values[0].clone();
    for v in &values[1..] {
        for (s, t) in acc.iter_mut().zip(v) {
            *s = op(*s, *t);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::SmoothFn;
    use crate::geometry::{subset, OperatorPolytope};
    use alloc::vec;

    fn same(a: &OperatorPolytope, b: &OperatorPolytope) -> bool {
        let t = Tolerance::default();
        subset(a, b, &t).unwrap().holds && subset(b, a, &t).unwrap().holds
    }

    #[test]
    fn abs_at_kink() {
        let q = qd_at(&Expr::abs(Expr::var(1)), &[0.0], &Tolerance::default()).unwrap();
        assert!(same(q.subd(), &OperatorPolytope::interval(-1.0, 1.0).unwrap()));
        assert!(same(q.supd(), &OperatorPolytope::zero(1, 1)));
    }

    #[test]
    fn abs_difference_at_origin() {
        let e = Expr::Add(vec![
            Expr::abs(Expr::coord(2, 0)),
            Expr::neg(Expr::abs(Expr::coord(2, 1))),
        ]);
        let q = qd_at(&e, &[0.0, 0.0], &Tolerance::default()).unwrap();
        let sub = OperatorPolytope::from_row_vectors(&[[1.0, 0.0], [-1.0, 0.0]]).unwrap();
        let sup = OperatorPolytope::from_row_vectors(&[[0.0, 1.0], [0.0, -1.0]]).unwrap();
        assert!(same(q.subd(), &sub));
        assert!(same(q.supd(), &sup));
    }

    #[test]
    fn affine_is_linear_qd() {
        let a = LinOp::from_rows(&[[1.0, 2.0], [0.0, -1.0]]).unwrap();
        let e = Expr::affine(a.clone(), vec![3.0, 4.0]);
        let q = qd_at(&e, &[5.0, -7.0], &Tolerance::default()).unwrap();
        assert_eq!(q.subd().generators(), &[a]);
        assert_eq!(q.supd(), &OperatorPolytope::zero(2, 2));
    }

    #[test]
    fn smooth_chain() {
        let e = Expr::smooth(SmoothFn::Sqr, Expr::var(1));
        let q = qd_at(&e, &[1.0], &Tolerance::default()).unwrap();
        assert_eq!(q.eval_dir(&[1.0]).unwrap(), vec![2.0]);
        assert_eq!(q.eval_dir(&[-0.5]).unwrap(), vec![-1.0]);
    }

    #[test]
    fn composed_abs() {
        // ||x| - 1| at x = 1 has derivative |h|
        let inner = Expr::Add(vec![Expr::abs(Expr::var(1)), Expr::constant(1, vec![-1.0])]);
        let e = Expr::compose(Expr::abs(Expr::var(1)), inner);
        let q = qd_at(&e, &[1.0], &Tolerance::default()).unwrap();
        for h in [-2.0, -0.5, 0.5, 3.0] {
            assert!((q.eval_dir(&[h]).unwrap()[0] - libm::fabs(h)).abs() < 1e-12);
        }
    }

    #[test]
    fn dimension_errors() {
        let t = Tolerance::default();
        assert!(qd_at(&Expr::var(2), &[1.0], &t).is_err());
        assert!(qd_at(&Expr::var(1), &[f64::NAN], &t).is_err());
    }
}
