//! Forward-difference estimate of the one-sided directional derivative
//! `lim_{t↓0} (f(x + t h) - f(x)) / t`.

use alloc::vec::Vec;

use crate::error::{Error, Result};

use super::{check_point, eval_unchecked, Expr};

pub const DEFAULT_STEPS: [f64; 4] = [1e-2, 1e-3, 1e-4, 1e-5];

#[derive(Clone, Debug, PartialEq)]
pub struct DiniEstimate {
    /// Reported derivative, coordinatewise.
    pub value: Vec<f64>,
    /// Difference quotients, one row per step.
    pub quotients: Vec<Vec<f64>>,
    /// Largest change between successive quotients (convergence diagnostic).
    pub spread: f64,
}

/// Estimates `f'(x) h` from forward quotients at the given decreasing steps.
///
/// Per coordinate, when the last three quotients shrink like a first-order
/// error term the last two are combined by Richardson extrapolation;
/// otherwise (a kink between steps, or quotients already equal) the last
/// quotient is reported.
pub fn dini_fd(e: &Expr, x: &[f64], h: &[f64], steps: &[f64]) -> Result<DiniEstimate> {
    let d = e.dims()?;
    check_point(x, d.input)?;
    check_point(h, d.input)?;
    if steps.len() < 4 {
        return Err(Error::InvalidArgument("at least four steps are required"));
    }
    if steps.iter().any(|s| !(s.is_finite() && *s > 0.0)) || steps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("steps must be positive and strictly decreasing"));
    }
    let f0 = eval_unchecked(e, x);
    let quotients: Vec<Vec<f64>> = steps
        .iter()
        .map(|&t| {
            let xt: Vec<f64> = x.iter().zip(h).map(|(a, b)| a + t * b).collect();
            eval_unchecked(e, &xt)
                .iter()
                .zip(&f0)
                .map(|(a, b)| (a - b) / t)
                .collect()
        })
        .collect();

    let k = steps.len() - 1;
    let mut spread: f64 = 0.0;
    for w in quotients.windows(2) {
        for (a, b) in w[0].iter().zip(&w[1]) {
            spread = spread.max(libm::fabs(a - b));
        }
    }
    let value = (0..d.output)
        .map(|j| {
            let (d0, d1, d2) = (quotients[k - 2][j], quotients[k - 1][j], quotients[k][j]);
            let (e0, e1) = (d0 - d1, d1 - d2);
            let expected = (steps[k - 2] - steps[k - 1]) / (steps[k - 1] - steps[k]);
            let scale = 1.0 + libm::fabs(d2);
            if libm::fabs(e1) <= 1e-13 * scale || e0 == 0.0 {
                return d2;
            }
            let ratio = e0 / e1;
            if ratio >= 0.5 * expected && ratio <= 2.0 * expected {
                (steps[k - 1] * d2 - steps[k] * d1) / (steps[k - 1] - steps[k])
            } else {
                d2
            }
        })
        .collect();
    Ok(DiniEstimate {
        value,
        quotients,
        spread,
    })
}
