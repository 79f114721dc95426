//! Wolfe's minimum-norm-point method over the convex hull of finitely many
//! points.

use alloc::vec;
use alloc::vec::Vec;

use super::linop::dot;

const WEIGHT_FLOOR: f64 = 1e-14;
const MAX_MAJOR: usize = 1_000;

/// Minimum-norm point of `conv(points)` and its barycentric weights
/// (indexed like `points`). `eps` is the relative optimality gap.
pub(crate) fn min_norm_point(points: &[Vec<f64>], eps: f64) -> (Vec<f64>, Vec<f64>) {
    debug_assert!(!points.is_empty());
    let d = points[0].len();
    let sq: Vec<f64> = points.iter().map(|p| dot(p, p)).collect();
    let scale = sq.iter().copied().fold(1.0, f64::max);

    let start = (0..points.len())
        .min_by(|&a, &b| sq[a].total_cmp(&sq[b]))
        .unwrap_or(0);
    let mut active: Vec<usize> = vec![start];
    let mut w: Vec<f64> = vec![1.0];
    let mut x = points[start].clone();

    for _ in 0..MAX_MAJOR {
        let xx = dot(&x, &x);
        if xx <= 1e-30 * scale {
            break;
        }
        let (j, xj) = (0..points.len())
            .map(|i| (i, dot(&x, &points[i])))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if xx - xj <= eps * scale || active.contains(&j) {
            break;
        }
        active.push(j);
        w.push(0.0);

        loop {
            let Some(v) = affine_minimizer(points, &active) else {
                // numerically dependent support: drop the newest point and stop
                active.pop();
                w.pop();
                return finish(points, &active, &w, d);
            };
            if v.iter().all(|&vi| vi > WEIGHT_FLOOR) {
                w = v;
                break;
            }
            let mut theta: f64 = 1.0;
            for (wi, vi) in w.iter().zip(&v) {
                if *vi <= WEIGHT_FLOOR && wi - vi > 0.0 {
                    theta = theta.min(wi / (wi - vi));
                }
            }
            for (wi, vi) in w.iter_mut().zip(&v) {
                *wi = (1.0 - theta) * *wi + theta * vi;
            }
            let mut k = 0;
            while k < active.len() {
                if w[k] <= WEIGHT_FLOOR {
                    active.remove(k);
                    w.remove(k);
                } else {
                    k += 1;
                }
            }
            let total: f64 = w.iter().sum();
            for wi in w.iter_mut() {
                *wi /= total;
            }
            if active.len() == 1 {
                break;
            }
        }
        x = combine(points, &active, &w, d);
    }
    finish(points, &active, &w, d)
}

fn finish(points: &[Vec<f64>], active: &[usize], w: &[f64], d: usize) -> (Vec<f64>, Vec<f64>) {
    let x = combine(points, active, w, d);
    let mut weights = vec![0.0; points.len()];
    for (i, wi) in active.iter().zip(w) {
        weights[*i] = *wi;
    }
    (x, weights)
}

fn combine(points: &[Vec<f64>], active: &[usize], w: &[f64], d: usize) -> Vec<f64> {
    let mut x = vec![0.0; d];
    for (i, wi) in active.iter().zip(w) {
        for (xk, pk) in x.iter_mut().zip(&points[*i]) {
            *xk += wi * pk;
        }
    }
    x
}

/// Minimizes `|Σ v_i p_i|` over the affine hull of the active points
/// (`Σ v_i = 1`). Returns `None` when the points are affinely dependent.
fn affine_minimizer(points: &[Vec<f64>], active: &[usize]) -> Option<Vec<f64>> {
    let k = active.len();
    let size = k + 1;
    let mut a = vec![0.0; size * size];
    let mut b = vec![0.0; size];
    for (r, &i) in active.iter().enumerate() {
        for (c, &j) in active.iter().enumerate() {
            a[r * size + c] = dot(&points[i], &points[j]);
        }
        a[r * size + k] = 1.0;
        a[k * size + r] = 1.0;
    }
    b[k] = 1.0;
    let sol = solve_dense(&mut a, &mut b, size)?;
    Some(sol[..k].to_vec())
}

/// Gaussian elimination with partial pivoting on a `size x size` system.
fn solve_dense(a: &mut [f64], b: &mut [f64], size: usize) -> Option<Vec<f64>> {
    let norm = a.iter().map(|v| libm::fabs(*v)).fold(0.0, f64::max).max(1.0);
    for col in 0..size {
        let piv = (col..size).max_by(|&r, &s| {
            libm::fabs(a[r * size + col]).total_cmp(&libm::fabs(a[s * size + col]))
        })?;
        if libm::fabs(a[piv * size + col]) <= 1e-13 * norm {
            return None;
        }
        if piv != col {
            for c in 0..size {
                a.swap(piv * size + c, col * size + c);
            }
            b.swap(piv, col);
        }
        for r in col + 1..size {
            let f = a[r * size + col] / a[col * size + col];
            if f == 0.0 {
                continue;
            }
            for c in col..size {
                a[r * size + c] -= f * a[col * size + c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; size];
    for r in (0..size).rev() {
        let mut s = b[r];
        for c in r + 1..size {
            s -= a[r * size + c] * x[c];
        }
        x[r] = s / a[r * size + r];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_projection() {
        let (x, w) = min_norm_point(&[vec![1.0, 0.0], vec![0.0, 1.0]], 1e-12);
        assert!((x[0] - 0.5).abs() < 1e-12 && (x[1] - 0.5).abs() < 1e-12);
        assert!((w[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn origin_inside_hull() {
        let pts = vec![vec![1.0, 1.0], vec![-1.0, 1.0], vec![0.0, -1.0], vec![0.2, 0.3]];
        let (x, w) = min_norm_point(&pts, 1e-12);
        assert!(dot(&x, &x) < 1e-20);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn vertex_is_nearest() {
        let pts = vec![vec![3.0, 1.0], vec![2.0, 2.0], vec![4.0, 4.0]];
        let (x, _) = min_norm_point(&pts, 1e-12);
        // along the edge (3-t, 1+t) the norm decreases up to the vertex (2, 2)
        assert!((x[0] - 2.0).abs() < 1e-10 && (x[1] - 2.0).abs() < 1e-10);
    }
}
