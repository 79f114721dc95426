//! Quasidifferential calculus for nonsmooth maps `f: R^n -> R^m`, where
//! `R^m` carries the coordinatewise order.
//!
//! A quasidifferential `[subd, supd]` is a pair of operator polytopes whose
//! support functions represent the one-sided directional derivative as a
//! difference of two sublinear maps:
//!
//! ```text
//! f'(x0) h = max_{S in subd} S h - max_{T in supd} T h      (coordinatewise)
//! ```
//!
//! The crate propagates such pairs through expression trees, checks necessary
//! optimality conditions for unconstrained, inequality-constrained,
//! set-constrained and multi-point vector programs, and runs a
//! quasidifferential descent method for scalar objectives.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(any(feature = "std", test))]
extern crate std;

mod error;
pub mod expr;
pub mod geometry;
mod lp;
pub mod optimality;
pub mod qd;
pub mod solver;

pub use error::{Error, Result};
pub use expr::{dini_fd, qd_at, Expr};
pub use geometry::{DirectionCone, LinOp, OperatorPolytope, PolyCone, Tolerance};
pub use optimality::{Constraint, ConstraintSystem, Verdict};
pub use qd::{BandMask, Orthomorphism, QuasiDiff};
