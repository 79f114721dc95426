//! Steepest descent for scalar objectives driven by quasidifferentials, with
//! Armijo backtracking.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::expr::{check_point, eval_unchecked, qd_at, Expr};
use crate::geometry::{nearest_point, Tolerance};
use crate::qd::QuasiDiff;

/// Steps below this length count as a failed line search.
pub const MIN_STEP: f64 = 1e-16;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverParams {
    pub max_iters: usize,
    pub step_init: f64,
    pub armijo_c: f64,
    pub shrink: f64,
    pub stop_dist: f64,
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverParams {
            max_iters: 500,
            step_init: 1.0,
            armijo_c: 1e-4,
            shrink: 0.5,
            stop_dist: 1e-8,
        }
    }
}

impl SolverParams {
    pub fn validate(&self) -> Result<()> {
        let open_unit = |v: f64| v > 0.0 && v < 1.0;
        if self.max_iters == 0 {
            return Err(Error::InvalidArgument("max_iters must be positive"));
        }
        if !(self.step_init.is_finite() && self.step_init > 0.0) {
            return Err(Error::InvalidArgument("step_init must be positive"));
        }
        if !open_unit(self.armijo_c) || !open_unit(self.shrink) {
            return Err(Error::InvalidArgument("armijo_c and shrink must lie in (0, 1)"));
        }
        if !(self.stop_dist.is_finite() && self.stop_dist > 0.0) {
            return Err(Error::InvalidArgument("stop_dist must be positive"));
        }
        Ok(())
    }
}

/// A descent direction and its rate `f'(x0) h`.
#[derive(Clone, Debug, PartialEq)]
pub struct Descent {
    /// Unit vector.
    pub direction: Vec<f64>,
    pub rate: f64,
    /// Largest distance from a supd generator to the subd polytope.
    pub distance: f64,
}

/// For each supd generator `w`, the nearest point `p_w` of `subd` and its
/// distance `d_w`. The farthest `w*` gives `h = (w* - p) / d`, whose rate is
/// at most `-d`. Returns `None` when `d <= stop_dist`.
pub fn steepest_descent_direction(q: &QuasiDiff, stop_dist: f64, tol: &Tolerance) -> Result<Option<Descent>> {
    let (m, _) = q.dims();
    if m != 1 {
        return Err(Error::NotScalar { m });
    }
    let q = q.reduced(tol)?;
    let mut best: Option<(f64, Vec<f64>)> = None;
    for w in q.supd().generators() {
        let near = nearest_point(q.subd(), w, tol)?;
        if best.as_ref().is_none_or(|(d, _)| near.distance > *d) {
            let h: Vec<f64> = w.as_slice().iter().zip(near.point.as_slice()).map(|(a, b)| a - b).collect();
            best = Some((near.distance, h));
        }
    }
    let (distance, h) = best.ok_or(Error::Empty("supd generators"))?;
    if distance <= stop_dist {
        return Ok(None);
    }
    let direction: Vec<f64> = h.iter().map(|v| v / distance).collect();
    let rate = q.eval_dir(&direction)?[0];
    Ok(Some(Descent {
        direction,
        rate,
        distance,
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverStatus {
    Stationary,
    MaxIters,
    LineSearchFailure,
}

impl SolverStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolverStatus::Stationary => "stationary",
            SolverStatus::MaxIters => "max_iters",
            SolverStatus::LineSearchFailure => "line_search_failure",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Iterate {
    pub x: Vec<f64>,
    pub value: f64,
    /// `d_{w*}` at `x`; zero when stationary.
    pub distance: f64,
    /// Step accepted from `x`; zero for the last iterate.
    pub step: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverTrace {
    pub iterates: Vec<Iterate>,
    pub status: SolverStatus,
}

impl SolverTrace {
    pub fn last(&self) -> &Iterate {
        self.iterates.last().expect("trace holds the starting point")
    }

    /// Number of accepted steps.
    pub fn steps(&self) -> usize {
        self.iterates.len() - 1
    }
}

/// Active-set threshold the descent starts from. Terms within this gap of
/// the max (or min) are treated as tied, which keeps the iterates from
/// zigzagging across kinks; the threshold shrinks by [`ACTIVE_SHRINK`] down to
/// `tol.eps_active` whenever it stalls the method.
pub const ACTIVE_START: f64 = 1e-2;
pub const ACTIVE_SHRINK: f64 = 0.1;

pub fn minimize(e: &Expr, x0: &[f64], params: &SolverParams, tol: &Tolerance) -> Result<SolverTrace> {
    params.validate()?;
    tol.validate()?;
    let d = e.dims()?;
    if d.output != 1 {
        return Err(Error::NotScalar { m: d.output });
    }
    check_point(x0, d.input)?;
    let f = |x: &[f64]| eval_unchecked(e, x)[0];

    let mut x = x0.to_vec();
    let mut fx = f(&x);
    let mut iterates = Vec::new();
    let mut status = SolverStatus::MaxIters;
    let mut eps = ACTIVE_START.max(tol.eps_active);
    let mut steps = 0;
    while steps < params.max_iters {
        let local = Tolerance { eps_active: eps, ..*tol };
        let q = qd_at(e, &x, &local)?;
        let at_base = eps <= tol.eps_active;
        let Some(dir) = steepest_descent_direction(&q, params.stop_dist, tol)? else {
            if at_base {
                status = SolverStatus::Stationary;
                break;
            }
            eps = (eps * ACTIVE_SHRINK).max(tol.eps_active);
            continue;
        };
        let Some((t, next, fnext)) = line_search(&f, &x, fx, &dir, params) else {
            if at_base {
                iterates.push(Iterate {
                    x: x.clone(),
                    value: fx,
                    distance: dir.distance,
                    step: 0.0,
                });
                return Ok(SolverTrace {
                    iterates,
                    status: SolverStatus::LineSearchFailure,
                });
            }
            eps = (eps * ACTIVE_SHRINK).max(tol.eps_active);
            continue;
        };
        iterates.push(Iterate {
            x: core::mem::replace(&mut x, next),
            value: fx,
            distance: dir.distance,
            step: t,
        });
        fx = fnext;
        steps += 1;
    }
    let distance = if status == SolverStatus::Stationary {
        0.0
    } else {
        let q = qd_at(e, &x, tol)?;
        steepest_descent_direction(&q, params.stop_dist, tol)?.map_or(0.0, |d| d.distance)
    };
    iterates.push(Iterate {
        x,
        value: fx,
        distance,
        step: 0.0,
    });
    Ok(SolverTrace { iterates, status })
}

/// Armijo backtracking from `step_init`; `None` once the step drops below
/// [`MIN_STEP`].
fn line_search(
    f: &dyn Fn(&[f64]) -> f64,
    x: &[f64],
    fx: f64,
    dir: &Descent,
    params: &SolverParams,
) -> Option<(f64, Vec<f64>, f64)> {
    let mut t = params.step_init;
    while t >= MIN_STEP {
        let trial: Vec<f64> = x.iter().zip(&dir.direction).map(|(a, b)| a + t * b).collect();
        let ft = f(&trial);
        if ft.is_finite() && ft <= fx + params.armijo_c * t * dir.rate && ft < fx {
            return Some((t, trial, ft));
        }
        t *= params.shrink;
    }
    None
}
