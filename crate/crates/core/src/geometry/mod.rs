//! Convex geometry over spaces of `m x n` operators: polytopes in
//! V-representation, finitely generated cones, support functions, and
//! LP-based membership, containment and projection.
//!
//! All set operations act on generator lists. Membership tests solve a small
//! linear program minimizing the max-norm residual and accept when it is at
//! most [`Tolerance::eps_geom`].

mod cone;
pub(crate) mod hull;
mod linop;
mod nearest;
mod polar;
mod polytope;

use alloc::vec::Vec;

pub use cone::{DirectionCone, PolyCone};
pub use linop::LinOp;
pub use polar::{polar_cone, vector_polar, MAX_POLAR_DIM};
pub use polytope::OperatorPolytope;

pub(crate) use linop::dot;

use crate::error::{Error, Result};

/// Numerical thresholds shared by the geometry, calculus and optimality code.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    /// Max-norm slack accepted by LP membership tests.
    pub eps_geom: f64,
    /// Slack below which a generator counts as redundant.
    pub eps_prune: f64,
    /// Tie threshold for active max/min terms and active constraints.
    pub eps_active: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            eps_geom: 1e-9,
            eps_prune: 1e-9,
            eps_active: 1e-9,
        }
    }
}

impl Tolerance {
    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(self.eps_geom) || !ok(self.eps_prune) || !ok(self.eps_active) {
            return Err(Error::InvalidArgument("tolerances must be finite and positive"));
        }
        if self.eps_prune > 1e-6 {
            return Err(Error::InvalidArgument("eps_prune must not exceed 1e-6"));
        }
        Ok(())
    }
}

/// Coordinatewise support value `sup_{S in P} S h` with maximizing generators.
#[derive(Clone, Debug, PartialEq)]
pub struct Support {
    pub value: Vec<f64>,
    /// Lowest-index maximizing generator for every coordinate.
    pub argmax: Vec<usize>,
}

pub fn support(p: &OperatorPolytope, h: &[f64]) -> Result<Support> {
    let (m, n) = p.dims();
    if h.len() != n {
        return Err(Error::DimensionMismatch {
            context: "support",
            expected: (n, 1),
            found: (h.len(), 1),
        });
    }
    let mut value = alloc::vec![f64::NEG_INFINITY; m];
    let mut argmax = alloc::vec![0usize; m];
    for (k, g) in p.generators().iter().enumerate() {
        for j in 0..m {
            let v = dot(g.row(j), h);
            if v > value[j] {
                value[j] = v;
                argmax[j] = k;
            }
        }
    }
    Ok(Support { value, argmax })
}

/// `conv(P) + conv(Q)`: all pairwise sums, pruned.
pub fn minkowski_sum(p: &OperatorPolytope, q: &OperatorPolytope, tol: &Tolerance) -> Result<OperatorPolytope> {
    q.check_dims(p.dims(), "minkowski_sum")?;
    let mut gens = Vec::with_capacity(p.len() * q.len());
    for a in p.generators() {
        for b in q.generators() {
            gens.push(a + b);
        }
    }
    OperatorPolytope::new(gens)?.pruned(tol)
}

/// `conv(P_1 ∪ ... ∪ P_k)`.
pub fn convex_union(ps: &[OperatorPolytope], tol: &Tolerance) -> Result<OperatorPolytope> {
    let first = ps.first().ok_or(Error::Empty("convex_union operands"))?;
    let mut gens = Vec::new();
    for p in ps {
        p.check_dims(first.dims(), "convex_union")?;
        gens.extend_from_slice(p.generators());
    }
    OperatorPolytope::new(gens)?.pruned(tol)
}

pub fn contains_point(p: &OperatorPolytope, t: &LinOp, tol: &Tolerance) -> Result<bool> {
    t.check_dims(p.dims(), "contains_point")?;
    let c = hull::closest_combination(t.as_slice(), &p.flat(), &[])?;
    Ok(c.residual <= tol.eps_geom)
}

/// Outcome of [`subset`]: `witness` is the first generator of `P` outside `Q`.
#[derive(Clone, Debug, PartialEq)]
pub struct Inclusion {
    pub holds: bool,
    pub witness: Option<LinOp>,
}

pub fn subset(p: &OperatorPolytope, q: &OperatorPolytope, tol: &Tolerance) -> Result<Inclusion> {
    q.check_dims(p.dims(), "subset")?;
    for g in p.generators() {
        if !contains_point(q, g, tol)? {
            return Ok(Inclusion {
                holds: false,
                witness: Some(g.clone()),
            });
        }
    }
    Ok(Inclusion {
        holds: true,
        witness: None,
    })
}

/// Certificate for `T = Σ_k weights[k] G_k + Σ_i Σ_l cone_coeffs[i][l] C_{i,l}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SumCertificate {
    /// Convex weights over the generators of the polytope.
    pub weights: Vec<f64>,
    /// Nonnegative coefficients over the generators of each cone.
    pub cone_coeffs: Vec<Vec<f64>>,
    /// Max-norm reconstruction error.
    pub residual: f64,
}

/// Tests `T ∈ conv(P) + K_1 + ... + K_r`; `Some(certificate)` on success.
pub fn contains_in_sum_with_cone(
    t: &LinOp,
    p: &OperatorPolytope,
    cones: &[PolyCone],
    tol: &Tolerance,
) -> Result<Option<SumCertificate>> {
    t.check_dims(p.dims(), "contains_in_sum_with_cone")?;
    let mut rays: Vec<&[f64]> = Vec::new();
    for k in cones {
        if k.dims() != p.dims() {
            return Err(Error::DimensionMismatch {
                context: "contains_in_sum_with_cone",
                expected: p.dims(),
                found: k.dims(),
            });
        }
        rays.extend(k.flat());
    }
    let c = hull::closest_combination(t.as_slice(), &p.flat(), &rays)?;
    if c.residual > tol.eps_geom {
        return Ok(None);
    }
    let mut cone_coeffs = Vec::with_capacity(cones.len());
    let mut offset = 0;
    for k in cones {
        let len = k.generators().len();
        cone_coeffs.push(c.coeffs[offset..offset + len].to_vec());
        offset += len;
    }
    Ok(Some(SumCertificate {
        weights: c.weights,
        cone_coeffs,
        residual: c.residual,
    }))
}

/// Nearest point of `conv(P)` to `T` in the Frobenius norm.
#[derive(Clone, Debug, PartialEq)]
pub struct NearestPoint {
    pub point: LinOp,
    pub distance: f64,
    /// Barycentric weights over the generators of `P`.
    pub weights: Vec<f64>,
}

pub fn nearest_point(p: &OperatorPolytope, t: &LinOp, tol: &Tolerance) -> Result<NearestPoint> {
    t.check_dims(p.dims(), "nearest_point")?;
    let shifted: Vec<Vec<f64>> = p
        .generators()
        .iter()
        .map(|g| g.as_slice().iter().zip(t.as_slice()).map(|(a, b)| a - b).collect())
        .collect();
    let (x, weights) = nearest::min_norm_point(&shifted, tol.eps_geom * 1e-3);
    let distance = libm::sqrt(dot(&x, &x));
    let data = x.iter().zip(t.as_slice()).map(|(a, b)| a + b).collect();
    let (m, n) = p.dims();
    Ok(NearestPoint {
        point: LinOp::from_flat(m, n, data),
        distance,
        weights,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn scalar(v: f64) -> LinOp {
        LinOp::new(1, 1, vec![v]).unwrap()
    }

    fn interval(lo: f64, hi: f64) -> OperatorPolytope {
        OperatorPolytope::interval(lo, hi).unwrap()
    }

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn support_examples() {
        let s = support(&interval(1.0, -1.0), &[2.0]).unwrap();
        assert_eq!(s.value, vec![2.0]);
        assert_eq!(s.argmax, vec![0]);
        let s = support(&OperatorPolytope::zero(1, 1), &[-7.0]).unwrap();
        assert_eq!(s.value, vec![0.0]);
        let p = OperatorPolytope::from_row_vectors(&[[1.0, 0.0], [0.0, 1.0]]).unwrap();
        let s = support(&p, &[3.0, 4.0]).unwrap();
        assert_eq!(s.value, vec![4.0]);
        assert_eq!(s.argmax, vec![1]);
        assert!(support(&p, &[1.0]).is_err());
    }

    #[test]
    fn support_ties_pick_lowest_index() {
        let p = OperatorPolytope::from_row_vectors(&[[1.0, 0.0], [1.0, 5.0], [1.0, -5.0]]).unwrap();
        assert_eq!(support(&p, &[1.0, 0.0]).unwrap().argmax, vec![0]);
    }

    #[test]
    fn minkowski_examples() {
        let t = tol();
        let r = minkowski_sum(&interval(-1.0, 1.0), &OperatorPolytope::zero(1, 1), &t).unwrap();
        assert_eq!(r, interval(-1.0, 1.0));
        let r = minkowski_sum(&interval(-1.0, 1.0), &interval(-1.0, 1.0), &t).unwrap();
        assert_eq!(r, interval(-2.0, 2.0));
        let a = OperatorPolytope::singleton(scalar(1.5));
        let b = OperatorPolytope::singleton(scalar(-0.5));
        assert_eq!(minkowski_sum(&a, &b, &t).unwrap(), OperatorPolytope::singleton(scalar(1.0)));
        assert!(minkowski_sum(&a, &OperatorPolytope::zero(2, 1), &t).is_err());
    }

    #[test]
    fn convex_union_examples() {
        let t = tol();
        let r = convex_union(
            &[OperatorPolytope::singleton(scalar(1.0)), OperatorPolytope::singleton(scalar(-1.0))],
            &t,
        )
        .unwrap();
        assert_eq!(r, interval(1.0, -1.0));
        let r = convex_union(&[interval(0.0, 1.0), OperatorPolytope::singleton(scalar(0.5))], &t).unwrap();
        assert_eq!(r, interval(0.0, 1.0));
        let r = convex_union(&[interval(0.0, 1.0), interval(0.0, 1.0)], &t).unwrap();
        assert_eq!(r, interval(0.0, 1.0));
        assert!(convex_union(&[], &t).is_err());
    }

    #[test]
    fn membership_examples() {
        let t = tol();
        assert!(contains_point(&interval(-1.0, 1.0), &scalar(0.0), &t).unwrap());
        assert!(!contains_point(&interval(-1.0, 1.0), &scalar(1.5), &t).unwrap());
        let tri = OperatorPolytope::from_row_vectors(&[[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]]).unwrap();
        let q = LinOp::row_vector(&[0.25, 0.25]).unwrap();
        assert!(contains_point(&tri, &q, &t).unwrap());
        let c = hull::closest_combination(q.as_slice(), &tri.flat(), &[]).unwrap();
        // the barycentric representation in a triangle is unique
        assert!((c.weights[0] - 0.25).abs() < 1e-12);
        assert!((c.weights[1] - 0.25).abs() < 1e-12);
        assert!((c.weights[2] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn subset_examples() {
        let t = tol();
        assert!(subset(&OperatorPolytope::zero(1, 1), &interval(-1.0, 1.0), &t).unwrap().holds);
        let r = subset(&interval(1.0, -1.0), &OperatorPolytope::zero(1, 1), &t).unwrap();
        assert!(!r.holds);
        assert_eq!(r.witness, Some(scalar(1.0)));
        assert!(subset(&interval(0.2, 0.8), &interval(0.0, 1.0), &t).unwrap().holds);
    }

    #[test]
    fn sum_with_cone_examples() {
        let t = tol();
        let one = OperatorPolytope::singleton(scalar(1.0));
        let k = PolyCone::new((1, 1), vec![scalar(-1.0)]).unwrap();
        let cert = contains_in_sum_with_cone(&scalar(0.0), &one, &[k], &t).unwrap().unwrap();
        assert!((cert.cone_coeffs[0][0] - 1.0).abs() < 1e-12);
        assert!((cert.weights[0] - 1.0).abs() < 1e-12);
        let trivial = PolyCone::trivial((1, 1));
        assert!(contains_in_sum_with_cone(&scalar(0.0), &one, &[trivial.clone()], &t).unwrap().is_none());
        assert!(contains_in_sum_with_cone(&scalar(0.0), &interval(-1.0, 1.0), &[trivial], &t)
            .unwrap()
            .is_some());
    }

    #[test]
    fn nearest_point_examples() {
        let t = tol();
        let r = nearest_point(&interval(-1.0, 1.0), &scalar(0.0), &t).unwrap();
        assert!(r.distance < 1e-12 && r.point.get(0, 0).abs() < 1e-12);
        let r = nearest_point(&interval(1.0, 2.0), &scalar(0.0), &t).unwrap();
        assert!((r.distance - 1.0).abs() < 1e-12 && (r.point.get(0, 0) - 1.0).abs() < 1e-12);
        let seg = OperatorPolytope::from_row_vectors(&[[1.0, 0.0], [0.0, 1.0]]).unwrap();
        let r = nearest_point(&seg, &LinOp::row_vector(&[0.0, 0.0]).unwrap(), &t).unwrap();
        assert!((r.distance - libm::sqrt(0.5)).abs() < 1e-12);
        assert!((r.point.get(0, 0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn polar_examples() {
        let t = tol();
        let halfline = DirectionCone::new(1, vec![vec![1.0]]).unwrap();
        let p = polar_cone(&halfline, 1, &t).unwrap();
        assert_eq!(p.generators(), &[scalar(-1.0)]);

        let full = DirectionCone::whole_space(3);
        assert!(polar_cone(&full, 2, &t).unwrap().is_trivial());

        let orthant = DirectionCone::orthant(2);
        let mut rays = vector_polar(&orthant, &t).unwrap();
        rays.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(rays, vec![vec![-1.0, 0.0], vec![0.0, -1.0]]);

        let trivial = DirectionCone::new(2, vec![]).unwrap();
        assert_eq!(vector_polar(&trivial, &t).unwrap().len(), 4);

        let big = DirectionCone::orthant(9);
        assert!(matches!(polar_cone(&big, 1, &t), Err(Error::UnsupportedDimension { .. })));
    }

    #[test]
    fn polar_rows_are_independent() {
        let t = tol();
        let k = DirectionCone::new(2, vec![vec![1.0, 1.0]]).unwrap();
        let p = polar_cone(&k, 2, &t).unwrap();
        assert_eq!(p.dims(), (2, 2));
        for g in p.generators() {
            for j in 0..2 {
                assert!(dot(g.row(j), &[1.0, 1.0]) <= 1e-12);
            }
        }
    }

    #[test]
    fn row_reduction_keeps_support() {
        let t = tol();
        let p = OperatorPolytope::new(vec![
            LinOp::from_rows(&[[1.0, 0.0], [0.0, 0.0]]).unwrap(),
            LinOp::from_rows(&[[0.5, 0.0], [2.0, 1.0]]).unwrap(),
            LinOp::from_rows(&[[-1.0, 0.0], [0.0, 0.0]]).unwrap(),
            LinOp::from_rows(&[[0.0, 1.0], [-1.0, -1.0]]).unwrap(),
        ])
        .unwrap();
        let r = p.row_reduced(&t).unwrap();
        assert_eq!(r.len(), 3);
        for h in [[1.0, 2.0], [-1.0, 0.5], [0.3, -2.0]] {
            assert_eq!(support(&p, &h).unwrap().value, support(&r, &h).unwrap().value);
        }
    }
}
