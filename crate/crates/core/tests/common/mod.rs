#![allow(dead_code)]

use qdcalc_core::expr::{Expr, SmoothFn};
use qdcalc_core::{LinOp, OperatorPolytope, QuasiDiff};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Multiple of `1/denom` in `[-max, max]`.
pub fn dyadic(rng: &mut ChaCha8Rng, max: f64, denom: f64) -> f64 {
    let k = (max * denom) as i64;
    rng.gen_range(-k..=k) as f64 / denom
}

pub fn dyadic_vec(rng: &mut ChaCha8Rng, len: usize, max: f64, denom: f64) -> Vec<f64> {
    (0..len).map(|_| dyadic(rng, max, denom)).collect()
}

/// Nonzero dyadic vector.
pub fn dyadic_direction(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    loop {
        let h = dyadic_vec(rng, len, 1.0, 8.0);
        if h.iter().any(|v| *v != 0.0) {
            return h;
        }
    }
}

pub fn gaussian_vec(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len)
        .map(|_| {
            // Box-Muller
            let u: f64 = rng.gen_range(1e-12..1.0);
            let v: f64 = rng.gen_range(0.0..1.0);
            (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
        })
        .collect()
}

pub fn unit_vec(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    loop {
        let g = gaussian_vec(rng, len);
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return g.iter().map(|v| v / norm).collect();
        }
    }
}

pub fn dyadic_linop(rng: &mut ChaCha8Rng, m: usize, n: usize) -> LinOp {
    LinOp::new(m, n, dyadic_vec(rng, m * n, 2.0, 4.0)).unwrap()
}

/// Shape of the random expressions.
#[derive(Clone, Copy, Debug)]
pub struct ExprShape {
    pub piecewise_linear: bool,
    /// Offsets and constants mostly vanish, so the origin sits on many kinks.
    pub centered: bool,
}

/// Random expression `R^n -> R^m` of depth at most `depth` with dyadic data.
pub fn random_expr(rng: &mut ChaCha8Rng, n: usize, m: usize, depth: usize, shape: ExprShape) -> Expr {
    let piecewise_linear = shape.piecewise_linear;
    if depth <= 1 || rng.gen_bool(0.15) {
        return leaf(rng, n, m, shape.centered);
    }
    let choice = if piecewise_linear { rng.gen_range(0..7) } else { rng.gen_range(0..9) };
    match choice {
        0 => Expr::abs(random_expr(rng, n, m, depth - 1, shape)),
        1 => Expr::neg(random_expr(rng, n, m, depth - 1, shape)),
        2 => Expr::Add(terms(rng, n, m, depth, shape)),
        3 => {
            let diag = (0..m).map(|_| nonzero_dyadic(rng)).collect();
            Expr::scale(diag, random_expr(rng, n, m, depth - 1, shape))
        }
        4 => Expr::Max(terms(rng, n, m, depth, shape)),
        5 => Expr::Min(terms(rng, n, m, depth, shape)),
        6 => {
            if depth < 3 {
                return Expr::abs(random_expr(rng, n, m, depth - 1, shape));
            }
            let k = rng.gen_range(1..=4);
            let outer_depth = rng.gen_range(1..depth - 1);
            let inner_depth = depth - outer_depth;
            let outer = random_expr(rng, k, m, outer_depth, shape);
            let inner = random_expr(rng, n, k, inner_depth, shape);
            Expr::compose(outer, inner)
        }
        7 => {
            let func = [SmoothFn::Sin, SmoothFn::Cos, SmoothFn::Exp, SmoothFn::Sqr, SmoothFn::Tanh][rng.gen_range(0..5)];
            if func == SmoothFn::Exp && depth >= 3 {
                // exp of a bounded argument stays tame
                let arg = random_expr(rng, n, m, depth - 2, shape);
                return Expr::smooth(func, Expr::smooth(SmoothFn::Tanh, arg));
            }
            let func = if func == SmoothFn::Exp { SmoothFn::Sin } else { func };
            Expr::smooth(func, random_expr(rng, n, m, depth - 1, shape))
        }
        _ => Expr::mul(
            random_expr(rng, n, m, depth - 1, shape),
            random_expr(rng, n, m, depth - 1, shape),
        ),
    }
}

fn terms(rng: &mut ChaCha8Rng, n: usize, m: usize, depth: usize, shape: ExprShape) -> Vec<Expr> {
    let count = rng.gen_range(2..=3);
    (0..count).map(|_| random_expr(rng, n, m, depth - 1, shape)).collect()
}

fn nonzero_dyadic(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let v = dyadic(rng, 2.0, 4.0);
        if v != 0.0 {
            return v;
        }
    }
}

fn leaf(rng: &mut ChaCha8Rng, n: usize, m: usize, centered: bool) -> Expr {
    let offset = |rng: &mut ChaCha8Rng| {
        if centered && rng.gen_bool(0.7) {
            vec![0.0; m]
        } else {
            dyadic_vec(rng, m, 2.0, 4.0)
        }
    };
    match rng.gen_range(0..4) {
        0 if m == n => Expr::var(n),
        1 if m == 1 => Expr::coord(n, rng.gen_range(0..n)),
        2 => Expr::constant(n, offset(rng)),
        _ => {
            let a = dyadic_linop(rng, m, n);
            Expr::affine(a, offset(rng))
        }
    }
}

/// Random `m x n` polytope with `1..=max_gens` generators drawn from `[-2, 2]`.
pub fn random_polytope(rng: &mut ChaCha8Rng, m: usize, n: usize, max_gens: usize) -> OperatorPolytope {
    let count = rng.gen_range(1..=max_gens);
    let gens = (0..count)
        .map(|_| LinOp::new(m, n, (0..m * n).map(|_| rng.gen_range(-2.0..2.0)).collect()).unwrap())
        .collect();
    OperatorPolytope::new(gens).unwrap()
}

pub fn random_qd(rng: &mut ChaCha8Rng, m: usize, n: usize, max_gens: usize) -> QuasiDiff {
    QuasiDiff::new(random_polytope(rng, m, n, max_gens), random_polytope(rng, m, n, max_gens)).unwrap()
}

/// Uniform sample from the ball of the given radius around `x0`.
pub fn ball_sample(rng: &mut ChaCha8Rng, x0: &[f64], radius: f64) -> Vec<f64> {
    let u = unit_vec(rng, x0.len());
    let r = radius * rng.gen_range(0.0f64..1.0).powf(1.0 / x0.len() as f64);
    x0.iter().zip(&u).map(|(a, b)| a + r * b).collect()
}

/// Local-sampling oracle: true when no sample in the ball (nor on its
/// boundary sphere) decreases any coordinate of `f` below `f(x0) - slack`.
pub fn sampled_local_min(f: impl Fn(&[f64]) -> Vec<f64>, x0: &[f64], radius: f64, samples: usize, seed: u64, slack: f64) -> bool {
    let mut rng = rng(seed);
    let f0 = f(x0);
    for i in 0..samples {
        let x = if i % 2 == 0 {
            ball_sample(&mut rng, x0, radius)
        } else {
            let u = unit_vec(&mut rng, x0.len());
            x0.iter().zip(&u).map(|(a, b)| a + radius * b).collect()
        };
        if f(&x).iter().zip(&f0).any(|(v, w)| *v < w - slack) {
            return false;
        }
    }
    true
}
