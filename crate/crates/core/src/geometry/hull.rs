//! Point-level primitives over flat vectors: membership in `conv(G) + cone(C)`,
//! redundancy pruning and separating directions. The operator-level API in
//! the parent module flattens matrices and delegates here.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpOutcome};

use super::linop::dot;

/// Weights certifying `target ≈ Σ weights_k hull_k + Σ coeffs_l cone_l`.
#[derive(Clone, Debug)]
pub(crate) struct Combination {
    pub weights: Vec<f64>,
    pub coeffs: Vec<f64>,
    /// Max-norm of the reconstruction error.
    pub residual: f64,
}

/// Minimizes the max-norm distance from `target` to `conv(hull) + cone(cone)`.
///
/// With an empty `hull` only the cone part is used (plain cone membership).
pub(crate) fn closest_combination(
    target: &[f64],
    hull: &[&[f64]],
    cone: &[&[f64]],
) -> Result<Combination> {
    let d = target.len();
    let p = hull.len();
    let q = cone.len();
    if p == 0 && q == 0 {
        let residual = target.iter().map(|v| libm::fabs(*v)).fold(0.0, f64::max);
        return Ok(Combination {
            weights: Vec::new(),
            coeffs: Vec::new(),
            residual,
        });
    }
    let n_vars = p + q + 1;
    let t = p + q;
    let mut lp = LinearProgram::new(n_vars);
    lp.set_cost(t, 1.0);
    for i in 0..d {
        let mut up = vec![0.0; n_vars];
        for (k, g) in hull.iter().enumerate() {
            up[k] = g[i];
        }
        for (l, c) in cone.iter().enumerate() {
            up[p + l] = c[i];
        }
        let mut down: Vec<f64> = up.iter().map(|v| -v).collect();
        up[t] = -1.0;
        down[t] = -1.0;
        lp.add_le(up, target[i]);
        lp.add_le(down, -target[i]);
    }
    if p > 0 {
        let mut simplex = vec![0.0; n_vars];
        for v in simplex[..p].iter_mut() {
            *v = 1.0;
        }
        lp.add_eq(simplex, 1.0);
    }
    let x = match lp.solve()? {
        LpOutcome::Optimal { x, .. } => x,
        _ => return Err(Error::Numerical("membership program has no optimum")),
    };
    let weights = x[..p].to_vec();
    let coeffs = x[p..p + q].to_vec();
    let residual = reconstruction_error(target, hull, &weights, cone, &coeffs);
    Ok(Combination {
        weights,
        coeffs,
        residual,
    })
}

pub(crate) fn reconstruction_error(
    target: &[f64],
    hull: &[&[f64]],
    weights: &[f64],
    cone: &[&[f64]],
    coeffs: &[f64],
) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, t) in target.iter().enumerate() {
        let mut v = 0.0;
        for (g, w) in hull.iter().zip(weights) {
            v += w * g[i];
        }
        for (c, w) in cone.iter().zip(coeffs) {
            v += w * c[i];
        }
        worst = worst.max(libm::fabs(v - t));
    }
    worst
}

/// Drops points lying in the convex hull of the remaining ones (within `eps`).
/// Among duplicates the lowest index survives; survivors keep their order.
pub(crate) fn prune_hull(points: Vec<Vec<f64>>, eps: f64) -> Result<Vec<Vec<f64>>> {
    if points.len() <= 1 {
        return Ok(points);
    }
    let d = points[0].len();
    if d == 1 {
        let (mut lo, mut hi) = (0usize, 0usize);
        for (i, p) in points.iter().enumerate() {
            if p[0] < points[lo][0] {
                lo = i;
            }
            if p[0] > points[hi][0] {
                hi = i;
            }
        }
        if points[hi][0] - points[lo][0] <= eps {
            return Ok(vec![points[lo.min(hi)].clone()]);
        }
        let (a, b) = if lo < hi { (lo, hi) } else { (hi, lo) };
        return Ok(vec![points[a].clone(), points[b].clone()]);
    }
    let mut alive = vec![true; points.len()];
    for i in (0..points.len()).rev() {
        if let Some(k) = (0..points.len()).find(|&k| k != i && alive[k] && near(&points[k], &points[i], eps)) {
            // exact duplicates: keep the earliest copy
            if k < i {
                alive[i] = false;
                continue;
            }
        }
        let others: Vec<&[f64]> = (0..points.len())
            .filter(|&k| k != i && alive[k])
            .map(|k| points[k].as_slice())
            .collect();
        if others.is_empty() {
            continue;
        }
        let c = closest_combination(&points[i], &others, &[])?;
        if c.residual <= eps {
            alive[i] = false;
        }
    }
    Ok(points
        .into_iter()
        .zip(alive)
        .filter_map(|(p, a)| a.then_some(p))
        .collect())
}

/// Drops zero rays and rays lying in the cone of the remaining ones.
/// Surviving rays are rescaled to unit max-norm.
pub(crate) fn prune_cone(rays: Vec<Vec<f64>>, eps: f64) -> Result<Vec<Vec<f64>>> {
    let mut rays: Vec<Vec<f64>> = rays
        .into_iter()
        .filter_map(|r| {
            let s = r.iter().map(|v| libm::fabs(*v)).fold(0.0, f64::max);
            (s > eps).then(|| r.iter().map(|v| v / s).collect())
        })
        .collect();
    let mut i = rays.len();
    while i > 0 {
        i -= 1;
        let others: Vec<&[f64]> = rays
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != i)
            .map(|(_, r)| r.as_slice())
            .collect();
        if others.is_empty() {
            break;
        }
        let c = closest_combination(&rays[i], &[], &others)?;
        if c.residual <= eps {
            rays.remove(i);
        }
    }
    Ok(rays)
}

/// Looks for `h` in the box `[-1, 1]^d` with `<p - s, h> < 0` for every hull
/// point `p` and `<c, h> <= 0` for every ray `c`, i.e. a direction strictly
/// separating `s` from `conv(hull) + cone(rays)`. Returns the best box
/// direction and `max_p <p - s, h>`; separation succeeded iff the value is
/// negative.
pub(crate) fn separating_direction(
    s: &[f64],
    hull: &[&[f64]],
    rays: &[&[f64]],
) -> Result<(Vec<f64>, f64)> {
    let d = s.len();
    // variables: h+ (d), h- (d), t+ , t-
    let n_vars = 2 * d + 2;
    let (tp, tm) = (2 * d, 2 * d + 1);
    let mut lp = LinearProgram::new(n_vars);
    lp.set_cost(tp, 1.0);
    lp.set_cost(tm, -1.0);
    for p in hull {
        let mut row = vec![0.0; n_vars];
        for i in 0..d {
            let g = p[i] - s[i];
            row[i] = g;
            row[d + i] = -g;
        }
        row[tp] = -1.0;
        row[tm] = 1.0;
        lp.add_le(row, 0.0);
    }
    for c in rays {
        let mut row = vec![0.0; n_vars];
        for i in 0..d {
            row[i] = c[i];
            row[d + i] = -c[i];
        }
        lp.add_le(row, 0.0);
    }
    for i in 0..d {
        let mut row = vec![0.0; n_vars];
        row[i] = 1.0;
        lp.add_le(row.clone(), 1.0);
        row[i] = 0.0;
        row[d + i] = 1.0;
        lp.add_le(row, 1.0);
    }
    // keep t bounded below so the program is never unbounded when hull is empty
    let mut row = vec![0.0; n_vars];
    row[tp] = -1.0;
    row[tm] = 1.0;
    lp.add_le(row, 1.0);
    let x = match lp.solve()? {
        LpOutcome::Optimal { x, .. } => x,
        _ => return Err(Error::Numerical("separation program has no optimum")),
    };
    let h: Vec<f64> = (0..d).map(|i| x[i] - x[d + i]).collect();
    let value = hull
        .iter()
        .map(|p| {
            let diff: Vec<f64> = p.iter().zip(s).map(|(a, b)| a - b).collect();
            dot(&diff, &h)
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let value = if hull.is_empty() { x[tp] - x[tm] } else { value };
    Ok((h, value))
}

fn near(a: &[f64], b: &[f64], eps: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| libm::fabs(x - y) <= eps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_membership_weights() {
        let pts = [[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]];
        let hull: Vec<&[f64]> = pts.iter().map(|p| p.as_slice()).collect();
        let c = closest_combination(&[0.25, 0.25], &hull, &[]).unwrap();
        assert!(c.residual <= 1e-12);
        let far = closest_combination(&[1.0, 1.0], &hull, &[]).unwrap();
        // max-norm nearest point on the hypotenuse is (0.5, 0.5)
        assert!((far.residual - 0.5).abs() < 1e-9);
    }

    #[test]
    fn prune_keeps_vertices_only() {
        let pts = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.5, 0.0],
            vec![0.0, 1.0],
            vec![0.2, 0.2],
            vec![1.0, 0.0],
        ];
        let kept = prune_hull(pts, 1e-9).unwrap();
        assert_eq!(kept, vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]);
    }

    #[test]
    fn prune_scalar_fast_path() {
        let kept = prune_hull(vec![vec![0.5], vec![0.0], vec![1.0], vec![0.0]], 1e-9).unwrap();
        assert_eq!(kept, vec![vec![0.0], vec![1.0]]);
        let kept = prune_hull(vec![vec![2.0], vec![2.0]], 1e-9).unwrap();
        assert_eq!(kept, vec![vec![2.0]]);
    }

    #[test]
    fn cone_pruning_and_lineality() {
        let rays = vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 2.0], vec![1.0, 1.0], vec![0.0, 0.0]];
        let kept = prune_cone(rays, 1e-9).unwrap();
        assert_eq!(kept.len(), 3);
    }

    #[test]
    fn separation_found_only_outside() {
        let pts = [[1.0], [2.0]];
        let hull: Vec<&[f64]> = pts.iter().map(|p| p.as_slice()).collect();
        let (h, v) = separating_direction(&[0.0], &hull, &[]).unwrap();
        assert!(h[0] < 0.0 && v < -0.5);
        assert!(separating_direction(&[1.5], &hull, &[]).unwrap().1 >= -1e-12);
        let ray = [-1.0];
        assert!(separating_direction(&[0.0], &hull, &[ray.as_slice()]).unwrap().1 >= -1e-12);
    }
}
