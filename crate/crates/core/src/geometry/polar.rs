//! Polar of a finitely generated direction cone by the double-description
//! method (generator form, one constraint at a time).

use alloc::vec::Vec;

use crate::error::{Error, Result};

use super::cone::{DirectionCone, PolyCone};
use super::hull::prune_cone;
use super::linop::{dot, LinOp};
use super::Tolerance;

/// Largest ambient dimension accepted by [`polar_cone`].
pub const MAX_POLAR_DIM: usize = 8;

/// Generators of the vector polar `{v : <v, k> <= 0 for all k in K}`.
pub fn vector_polar(k: &DirectionCone, tol: &Tolerance) -> Result<Vec<Vec<f64>>> {
    let n = k.dim();
    if n > MAX_POLAR_DIM {
        return Err(Error::UnsupportedDimension {
            context: "polar cone enumeration",
            dim: n,
            limit: MAX_POLAR_DIM,
        });
    }
    let mut rays: Vec<Vec<f64>> = DirectionCone::whole_space(n).generators().to_vec();
    for a in k.generators() {
        let scale = a.iter().map(|v| libm::fabs(*v)).fold(0.0, f64::max);
        if scale <= tol.eps_geom {
            continue;
        }
        let a: Vec<f64> = a.iter().map(|v| v / scale).collect();
        let vals: Vec<f64> = rays.iter().map(|r| dot(&a, r)).collect();
        let mut next: Vec<Vec<f64>> = Vec::new();
        for (r, v) in rays.iter().zip(&vals) {
            if *v <= tol.eps_geom {
                next.push(r.clone());
            }
        }
        for (p, vp) in rays.iter().zip(&vals) {
            if *vp <= tol.eps_geom {
                continue;
            }
            for (q, vq) in rays.iter().zip(&vals) {
                if *vq >= -tol.eps_geom {
                    continue;
                }
                // (a.p) q - (a.q) p lies on the hyperplane a.x = 0
                let r: Vec<f64> = q.iter().zip(p).map(|(qi, pi)| vp * qi - vq * pi).collect();
                next.push(r);
            }
        }
        rays = prune_cone(next, tol.eps_prune.max(1e-12))?;
    }
    Ok(rays)
}

/// Normal-cone generators `{T : T k <= 0 for all k in K}` as `m x n`
/// operators: every row independently ranges over the vector polar, so the
/// cone is generated by `e_j ⊗ v` for each output row `j` and polar ray `v`.
pub fn polar_cone(k: &DirectionCone, m: usize, tol: &Tolerance) -> Result<PolyCone> {
    if m == 0 {
        return Err(Error::Empty("polar cone output dimension"));
    }
    let n = k.dim();
    let rays = vector_polar(k, tol)?;
    let mut gens = Vec::with_capacity(m * rays.len());
    for j in 0..m {
        for v in &rays {
            let mut data = alloc::vec![0.0; m * n];
            data[j * n..(j + 1) * n].copy_from_slice(v);
            gens.push(LinOp::from_flat(m, n, data));
        }
    }
    PolyCone::new((m, n), gens)
}
