use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::{convex_union, minkowski_sum, support, LinOp, OperatorPolytope, Tolerance};

use super::{active_sets, Extremum, Orthomorphism, QuasiDiff};

/// Largest inner dimension accepted by [`qd_compose`].
pub const MAX_COMPOSE_DIM: usize = 8;

/// `[{T}, {0}]`.
pub fn qd_linear(t: &LinOp) -> QuasiDiff {
    let (m, n) = t.dims();
    QuasiDiff {
        subd: OperatorPolytope::singleton(t.clone()),
        supd: OperatorPolytope::zero(m, n),
    }
}

/// `f'(x0) h = support(subd, h) - support(supd, h)`.
pub fn qd_eval_dir(q: &QuasiDiff, h: &[f64]) -> Result<Vec<f64>> {
    let a = support(&q.subd, h)?.value;
    let b = support(&q.supd, h)?.value;
    Ok(a.iter().zip(&b).map(|(x, y)| x - y).collect())
}

/// Sum rule: both polytopes add.
pub fn qd_add(qs: &[QuasiDiff], tol: &Tolerance) -> Result<QuasiDiff> {
    let first = qs.first().ok_or(Error::Empty("qd_add operands"))?;
    let dims = first.dims();
    for q in qs {
        check_qd(q, dims, "qd_add")?;
    }
    let rows = RowTable::new(qs);
    let mut subd = Vec::with_capacity(dims.0);
    let mut supd = Vec::with_capacity(dims.0);
    for j in 0..dims.0 {
        subd.push(row_combination(dims.1, rows.sub[j].iter().map(|p| (1.0, p)), tol)?);
        supd.push(row_combination(dims.1, rows.sup[j].iter().map(|p| (1.0, p)), tol)?);
    }
    stack(subd, supd)
}

/// Scaling by an orthomorphism:
/// `[α⁺ subd + α⁻ supd, α⁻ subd + α⁺ supd]`.
pub fn qd_scale(alpha: &Orthomorphism, q: &QuasiDiff, tol: &Tolerance) -> Result<QuasiDiff> {
    let (m, n) = q.dims();
    if alpha.len() != m {
        return Err(Error::DimensionMismatch {
            context: "qd_scale",
            expected: (m, 1),
            found: (alpha.len(), 1),
        });
    }
    let pos = alpha.positive_part();
    let neg = alpha.negative_part();
    let mut subd = Vec::with_capacity(m);
    let mut supd = Vec::with_capacity(m);
    for j in 0..m {
        let a = q.subd.row_polytope(j)?;
        let b = q.supd.row_polytope(j)?;
        subd.push(row_combination(n, [(pos[j], &a), (neg[j], &b)], tol)?);
        supd.push(row_combination(n, [(neg[j], &a), (pos[j], &b)], tol)?);
    }
    stack(subd, supd)
}

/// Pointwise supremum `f_1 ∨ ... ∨ f_r`, given the operand values at the
/// base point.
///
/// `supd = Σ_l supd f_l`. Row `j` of `subd` is the convex hull, over the
/// indices `k` active at coordinate `j`, of row `j` of
/// `subd f_k + Σ_{l≠k} supd f_l`.
pub fn qd_sup(qs: &[QuasiDiff], values: &[Vec<f64>], tol: &Tolerance) -> Result<QuasiDiff> {
    lattice_rule(qs, values, Extremum::Max, tol)
}

/// Pointwise infimum `f_1 ∧ ... ∧ f_r`; the dual of [`qd_sup`] with the
/// roles of the two polytopes exchanged and minimizing terms active.
pub fn qd_inf(qs: &[QuasiDiff], values: &[Vec<f64>], tol: &Tolerance) -> Result<QuasiDiff> {
    lattice_rule(qs, values, Extremum::Min, tol)
}

fn lattice_rule(qs: &[QuasiDiff], values: &[Vec<f64>], sense: Extremum, tol: &Tolerance) -> Result<QuasiDiff> {
    let first = qs.first().ok_or(Error::Empty("lattice operands"))?;
    let (m, n) = first.dims();
    for q in qs {
        check_qd(q, (m, n), "qd_sup/qd_inf")?;
    }
    if values.len() != qs.len() {
        return Err(Error::DimensionMismatch {
            context: "qd_sup/qd_inf values",
            expected: (qs.len(), m),
            found: (values.len(), m),
        });
    }
    for v in values {
        if v.len() != m {
            return Err(Error::DimensionMismatch {
                context: "qd_sup/qd_inf values",
                expected: (qs.len(), m),
                found: (values.len(), v.len()),
            });
        }
    }
    let active = active_sets(values, sense, tol.eps_active)?;
    let rows = RowTable::new(qs);
    // For sup the union lives in subd and the plain sum in supd; inf swaps them.
    let (own, other) = match sense {
        Extremum::Max => (&rows.sub, &rows.sup),
        Extremum::Min => (&rows.sup, &rows.sub),
    };
    let mut union_rows = Vec::with_capacity(m);
    let mut sum_rows = Vec::with_capacity(m);
    for j in 0..m {
        sum_rows.push(row_combination(n, other[j].iter().map(|p| (1.0, p)), tol)?);
        let pieces = active[j]
            .iter()
            .map(|&k| {
                let terms = (0..qs.len()).map(|l| if l == k { (1.0, &own[j][l]) } else { (1.0, &other[j][l]) });
                row_combination(n, terms, tol)
            })
            .collect::<Result<Vec<_>>>()?;
        union_rows.push(convex_union(&pieces, tol)?);
    }
    match sense {
        Extremum::Max => stack(union_rows, sum_rows),
        Extremum::Min => stack(sum_rows, union_rows),
    }
}

/// Product rule for `x -> g(x) f(x)` where `g` takes values in the diagonal
/// orthomorphisms (represented by their diagonals, so `g` is an `R^m`-valued
/// map like `f`):
///
/// ```text
/// subd(gf) = g⁺ subd f + g⁻ supd f + f⁺ subd g + f⁻ supd g
/// supd(gf) = g⁺ supd f + g⁻ subd f + f⁺ supd g + f⁻ subd g
/// ```
///
/// with `g0 = g(x0)`, `f0 = f(x0)` and their positive and negative parts.
pub fn qd_product(qg: &QuasiDiff, g0: &[f64], qf: &QuasiDiff, f0: &[f64], tol: &Tolerance) -> Result<QuasiDiff> {
    let (m, n) = qf.dims();
    check_qd(qg, (m, n), "qd_product")?;
    if g0.len() != m || f0.len() != m {
        return Err(Error::DimensionMismatch {
            context: "qd_product values",
            expected: (m, 1),
            found: (g0.len().max(f0.len()), 1),
        });
    }
    let mut subd = Vec::with_capacity(m);
    let mut supd = Vec::with_capacity(m);
    for j in 0..m {
        let (gp, gm) = (g0[j].max(0.0), (-g0[j]).max(0.0));
        let (fp, fm) = (f0[j].max(0.0), (-f0[j]).max(0.0));
        let (f_sub, f_sup) = (qf.subd.row_polytope(j)?, qf.supd.row_polytope(j)?);
        let (g_sub, g_sup) = (qg.subd.row_polytope(j)?, qg.supd.row_polytope(j)?);
        subd.push(row_combination(
            n,
            [(gp, &f_sub), (gm, &f_sup), (fp, &g_sub), (fm, &g_sup)],
            tol,
        )?);
        supd.push(row_combination(
            n,
            [(gp, &f_sup), (gm, &f_sub), (fp, &g_sup), (fm, &g_sub)],
            tol,
        )?);
    }
    stack(subd, supd)
}

/// Entrywise min and max over all generators of both polytopes of `qg`:
/// the tightest box `[lower, upper]` containing them.
pub fn default_bounds(qg: &QuasiDiff) -> (LinOp, LinOp) {
    let (l, m) = qg.dims();
    let mut lo = alloc::vec![f64::INFINITY; l * m];
    let mut hi = alloc::vec![f64::NEG_INFINITY; l * m];
    for g in qg.subd.generators().iter().chain(qg.supd.generators()) {
        for (k, v) in g.as_slice().iter().enumerate() {
            lo[k] = lo[k].min(*v);
            hi[k] = hi[k].max(*v);
        }
    }
    (LinOp::from_flat(l, m, lo), LinOp::from_flat(l, m, hi))
}

/// Composition rule for `g ∘ f` with `qg` taken at `f(x0)` (`l x m`) and `qf`
/// at `x0` (`m x n`).
///
/// Every generator `C` of `qg` must satisfy `lower <= C <= upper` entrywise.
/// With the positive operators `A = C - lower`, `B = upper - C`, the sublinear
/// map `P_C(h) = A p_f(h) + B q_f(h)` (`p_f`, `q_f` the support functions of
/// `qf`) has the support set whose row `i` is
/// `Σ_j A_ij row_j(subd f) + Σ_j B_ij row_j(supd f)`. The result is
/// `[conv ∪_{C in subd g} ∂P_C, conv ∪_{C in supd g} ∂P_C]`; the common term
/// `upper q_f - lower p_f` cancels in the difference.
pub fn qd_compose(
    qg: &QuasiDiff,
    qf: &QuasiDiff,
    bounds: Option<(&LinOp, &LinOp)>,
    tol: &Tolerance,
) -> Result<QuasiDiff> {
    let (l, m) = qg.dims();
    let (mf, n) = qf.dims();
    if mf != m {
        return Err(Error::DimensionMismatch {
            context: "qd_compose",
            expected: (m, n),
            found: (mf, n),
        });
    }
    if m > MAX_COMPOSE_DIM {
        return Err(Error::UnsupportedDimension {
            context: "composition inner dimension",
            dim: m,
            limit: MAX_COMPOSE_DIM,
        });
    }
    let owned;
    let (lower, upper) = match bounds {
        Some((lo, hi)) => {
            lo.check_dims((l, m), "qd_compose lower bound")?;
            hi.check_dims((l, m), "qd_compose upper bound")?;
            (lo, hi)
        }
        None => {
            owned = default_bounds(qg);
            (&owned.0, &owned.1)
        }
    };
    for g in qg.subd.generators().iter().chain(qg.supd.generators()) {
        for i in 0..l {
            for j in 0..m {
                let v = g.get(i, j);
                if v < lower.get(i, j) - tol.eps_geom || v > upper.get(i, j) + tol.eps_geom {
                    return Err(Error::BoundViolation { row: i, col: j, value: v });
                }
            }
        }
    }

    let f_sub: Vec<OperatorPolytope> = (0..m)
        .map(|j| qf.subd.row_polytope(j)?.pruned(tol))
        .collect::<Result<_>>()?;
    let f_sup: Vec<OperatorPolytope> = (0..m)
        .map(|j| qf.supd.row_polytope(j)?.pruned(tol))
        .collect::<Result<_>>()?;

    let image_row = |i: usize, outer: &OperatorPolytope| -> Result<OperatorPolytope> {
        let choices = outer.row_polytope(i)?.pruned(tol)?;
        let pieces = choices
            .generators()
            .iter()
            .map(|c| {
                let mut terms: Vec<(f64, &OperatorPolytope)> = Vec::with_capacity(2 * m);
                for j in 0..m {
                    let a = (c.get(0, j) - lower.get(i, j)).max(0.0);
                    let b = (upper.get(i, j) - c.get(0, j)).max(0.0);
                    terms.push((a, &f_sub[j]));
                    terms.push((b, &f_sup[j]));
                }
                row_combination(n, terms, tol)
            })
            .collect::<Result<Vec<_>>>()?;
        convex_union(&pieces, tol)
    };

    let mut subd = Vec::with_capacity(l);
    let mut supd = Vec::with_capacity(l);
    for i in 0..l {
        subd.push(image_row(i, &qg.subd)?);
        supd.push(image_row(i, &qg.supd)?);
    }
    stack(subd, supd)
}

/// Row polytopes of every operand: `sub[j][k]` is row `j` of `subd q_k`.
struct RowTable {
    sub: Vec<Vec<OperatorPolytope>>,
    sup: Vec<Vec<OperatorPolytope>>,
}

impl RowTable {
    fn new(qs: &[QuasiDiff]) -> Self {
        let m = qs[0].dims().0;
        let take = |p: &OperatorPolytope, j: usize| p.row_polytope(j).expect("row index checked");
        RowTable {
            sub: (0..m).map(|j| qs.iter().map(|q| take(&q.subd, j)).collect()).collect(),
            sup: (0..m).map(|j| qs.iter().map(|q| take(&q.supd, j)).collect()).collect(),
        }
    }
}

/// `Σ c_k P_k` for nonnegative `c_k` over `1 x n` row polytopes; zero
/// coefficients are skipped and an empty sum is `{0}`.
fn row_combination<'a, I>(n: usize, terms: I, tol: &Tolerance) -> Result<OperatorPolytope>
where
    I: IntoIterator<Item = (f64, &'a OperatorPolytope)>,
{
    let mut acc = OperatorPolytope::zero(1, n);
    for (c, p) in terms {
        debug_assert!(c >= 0.0);
        if c == 0.0 {
            continue;
        }
        let scaled = if c == 1.0 { p.clone() } else { p.scaled(c) };
        acc = minkowski_sum(&acc, &scaled.pruned(tol)?, tol)?;
    }
    Ok(acc)
}

fn stack(subd: Vec<OperatorPolytope>, supd: Vec<OperatorPolytope>) -> Result<QuasiDiff> {
    QuasiDiff::new(
        OperatorPolytope::from_row_polytopes(&subd)?,
        OperatorPolytope::from_row_polytopes(&supd)?,
    )
}

fn check_qd(q: &QuasiDiff, dims: (usize, usize), context: &'static str) -> Result<()> {
    if q.dims() != dims {
        return Err(Error::DimensionMismatch {
            context,
            expected: dims,
            found: q.dims(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{contains_point, subset};
    use alloc::vec;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn s(v: f64) -> LinOp {
        LinOp::new(1, 1, vec![v]).unwrap()
    }

    fn single(v: f64) -> OperatorPolytope {
        OperatorPolytope::singleton(s(v))
    }

    fn interval(a: f64, b: f64) -> OperatorPolytope {
        OperatorPolytope::interval(a, b).unwrap()
    }

    fn abs_qd() -> QuasiDiff {
        QuasiDiff::new(interval(-1.0, 1.0), single(0.0)).unwrap()
    }

    /// Two polytopes describe the same support function on a direction grid.
    fn same_support(a: &OperatorPolytope, b: &OperatorPolytope) -> bool {
        let t = tol();
        subset(a, b, &t).unwrap().holds && subset(b, a, &t).unwrap().holds
    }

    #[test]
    fn linear_examples() {
        let q = qd_linear(&s(3.0));
        assert_eq!(q.subd(), &single(3.0));
        assert_eq!(q.supd(), &single(0.0));
        let q = qd_linear(&LinOp::from_rows(&[[1.0, -2.0]]).unwrap());
        assert_eq!(qd_eval_dir(&q, &[0.5, 1.0]).unwrap(), vec![-1.5]);
    }

    #[test]
    fn add_examples() {
        let t = tol();
        let q = qd_add(&[abs_qd(), abs_qd().negated()], &t).unwrap();
        assert!(same_support(q.subd(), &interval(-1.0, 1.0)));
        assert!(same_support(q.supd(), &interval(-1.0, 1.0)));
        for h in [-2.0, 0.3, 5.0] {
            assert_eq!(qd_eval_dir(&q, &[h]).unwrap(), vec![0.0]);
        }
        let zero = qd_linear(&s(0.0));
        let q = qd_add(&[abs_qd(), zero], &t).unwrap();
        assert!(same_support(q.subd(), abs_qd().subd()));
        let q = qd_add(&[qd_linear(&s(1.0)), qd_linear(&s(2.0))], &t).unwrap();
        assert_eq!(q.subd(), &single(3.0));
        assert_eq!(q.supd(), &single(0.0));
    }

    #[test]
    fn scale_examples() {
        let t = tol();
        let minus = Orthomorphism::new(vec![-1.0]).unwrap();
        let q = qd_scale(&minus, &abs_qd(), &t).unwrap();
        assert!(same_support(q.subd(), &single(0.0)));
        assert!(same_support(q.supd(), &interval(-1.0, 1.0)));
        let q = qd_scale(&Orthomorphism::identity(1), &abs_qd(), &t).unwrap();
        assert!(same_support(q.subd(), abs_qd().subd()));
        let q = qd_scale(&Orthomorphism::new(vec![0.0]).unwrap(), &abs_qd(), &t).unwrap();
        assert_eq!(q.subd(), &single(0.0));
        assert_eq!(q.supd(), &single(0.0));
        assert!(qd_scale(&Orthomorphism::identity(2), &abs_qd(), &t).is_err());
    }

    #[test]
    fn sup_of_plus_minus_identity_is_abs() {
        let t = tol();
        let q = qd_sup(&[qd_linear(&s(1.0)), qd_linear(&s(-1.0))], &[vec![0.0], vec![0.0]], &t).unwrap();
        assert!(same_support(q.subd(), &interval(-1.0, 1.0)));
        assert!(same_support(q.supd(), &single(0.0)));
    }

    #[test]
    fn sup_of_duplicate_operand() {
        let t = tol();
        let f = QuasiDiff::new(interval(-1.0, 2.0), interval(0.0, 1.0)).unwrap();
        let q = qd_sup(&[f.clone(), f.clone()], &[vec![0.5], vec![0.5]], &t).unwrap();
        for h in [-1.0, -0.25, 0.0, 0.7, 3.0] {
            let a = qd_eval_dir(&q, &[h]).unwrap()[0];
            let b = qd_eval_dir(&f, &[h]).unwrap()[0];
            assert!((a - b).abs() < 1e-12);
        }
        let single_op = qd_sup(&[f.clone()], &[vec![0.0]], &t).unwrap();
        assert!(same_support(single_op.subd(), f.subd()));
        assert!(same_support(single_op.supd(), f.supd()));
    }

    #[test]
    fn inf_examples() {
        let t = tol();
        let q = qd_inf(&[qd_linear(&s(1.0)), qd_linear(&s(-1.0))], &[vec![0.0], vec![0.0]], &t).unwrap();
        assert!(same_support(q.subd(), &single(0.0)));
        assert!(same_support(q.supd(), &interval(-1.0, 1.0)));

        // min(f, f + 1) where only f is active
        let f = abs_qd();
        let q = qd_inf(&[f.clone(), f.clone()], &[vec![0.0], vec![1.0]], &t).unwrap();
        for h in [-1.0, 2.0] {
            assert_eq!(qd_eval_dir(&q, &[h]).unwrap(), qd_eval_dir(&f, &[h]).unwrap());
        }
        assert!(qd_inf(&[], &[], &t).is_err());
        assert!(qd_inf(&[f.clone()], &[vec![0.0], vec![1.0]], &t).is_err());
    }

    #[test]
    fn product_examples() {
        let t = tol();
        // g(x) = x, f(x) = |x| at 0
        let q = qd_product(&qd_linear(&s(1.0)), &[0.0], &abs_qd(), &[0.0], &t).unwrap();
        assert_eq!(q.subd(), &single(0.0));
        assert_eq!(q.supd(), &single(0.0));
        // g = 1 constant
        let q = qd_product(&qd_linear(&s(0.0)), &[1.0], &abs_qd(), &[0.0], &t).unwrap();
        assert!(same_support(q.subd(), abs_qd().subd()));
        assert!(same_support(q.supd(), abs_qd().supd()));
        // x * x at 1
        let q = qd_product(&qd_linear(&s(1.0)), &[1.0], &qd_linear(&s(1.0)), &[1.0], &t).unwrap();
        assert_eq!(q.subd(), &single(2.0));
        assert_eq!(q.supd(), &single(0.0));
    }

    #[test]
    fn compose_abs_with_identity() {
        let t = tol();
        let q = qd_compose(&abs_qd(), &qd_linear(&s(1.0)), Some((&s(-1.0), &s(1.0))), &t).unwrap();
        assert!(same_support(q.subd(), &interval(0.0, 2.0)));
        assert!(same_support(q.supd(), &single(1.0)));
        for h in [-3.0, -0.5, 0.0, 2.0] {
            assert!((qd_eval_dir(&q, &[h]).unwrap()[0] - libm::fabs(h)).abs() < 1e-12);
        }
        // default bounds coincide with [-1, 1] here
        let d = qd_compose(&abs_qd(), &qd_linear(&s(1.0)), None, &t).unwrap();
        assert!(same_support(d.subd(), q.subd()));
    }

    #[test]
    fn compose_linear_outer_is_chain_rule() {
        let t = tol();
        let a = LinOp::from_rows(&[[2.0, -1.0]]).unwrap();
        let inner = QuasiDiff::new(
            OperatorPolytope::new(vec![
                LinOp::from_rows(&[[1.0], [0.0]]).unwrap(),
                LinOp::from_rows(&[[-1.0], [3.0]]).unwrap(),
            ])
            .unwrap(),
            OperatorPolytope::new(vec![LinOp::from_rows(&[[0.5], [1.0]]).unwrap()]).unwrap(),
        )
        .unwrap();
        let q = qd_compose(&qd_linear(&a), &inner, None, &t).unwrap();
        for h in [-2.0, -1.0, 0.5, 4.0] {
            let u = qd_eval_dir(&inner, &[h]).unwrap();
            let expect = 2.0 * u[0] - u[1];
            assert!((qd_eval_dir(&q, &[h]).unwrap()[0] - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn compose_rejects_bad_bounds_and_large_inner_dim() {
        let t = tol();
        let err = qd_compose(&abs_qd(), &qd_linear(&s(1.0)), Some((&s(-0.5), &s(1.0))), &t).unwrap_err();
        assert!(matches!(err, Error::BoundViolation { .. }));
        let outer = qd_linear(&LinOp::zeros(1, 9));
        let inner = qd_linear(&LinOp::zeros(9, 1));
        assert!(matches!(
            qd_compose(&outer, &inner, None, &t),
            Err(Error::UnsupportedDimension { .. })
        ));
    }

    #[test]
    fn eval_dir_examples() {
        let q = abs_qd();
        assert_eq!(qd_eval_dir(&q, &[-2.0]).unwrap(), vec![2.0]);
        assert_eq!(qd_eval_dir(&q, &[0.0]).unwrap(), vec![0.0]);
        // |x1| - |x2| at 0
        let sub = OperatorPolytope::from_row_vectors(&[[1.0, 0.0], [-1.0, 0.0]]).unwrap();
        let sup = OperatorPolytope::from_row_vectors(&[[0.0, 1.0], [0.0, -1.0]]).unwrap();
        let q = QuasiDiff::new(sub, sup).unwrap();
        assert_eq!(qd_eval_dir(&q, &[0.0, 1.0]).unwrap(), vec![-1.0]);
        assert!(qd_eval_dir(&q, &[1.0]).is_err());
    }

    #[test]
    fn rules_keep_vertices_only() {
        let t = tol();
        let q = qd_add(&[abs_qd(), abs_qd(), abs_qd()], &t).unwrap();
        assert_eq!(q.subd().len(), 2);
        assert!(contains_point(q.subd(), &s(3.0), &t).unwrap());
        assert!(!contains_point(q.subd(), &s(3.1), &t).unwrap());
    }
}
