//! JSON problem and report formats for `qdcalc-core`, plus the `qd`, `check`
//! and `minimize` commands behind the `qdcalc` binary.

pub mod commands;
pub mod json;
pub mod problem;
pub mod report;
pub mod text;

use std::fmt;

pub use commands::{cmd_check, cmd_minimize, cmd_qd, Outcome, Overrides, Settings};
pub use problem::{Compiled, ExprJson, ProblemFile};
pub use report::Report;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    /// The optimality condition fails at the point.
    pub const FAILS: i32 = 1;
    /// Unreadable input, malformed JSON, unknown or missing fields, bad options.
    pub const SCHEMA: i32 = 2;
    pub const DIMENSION: i32 = 3;
    pub const INFEASIBLE: i32 = 4;
    /// `minimize` on a vector objective.
    pub const NOT_SCALAR: i32 = 5;
    /// A linear program or enumeration broke down.
    pub const NUMERICAL: i32 = 6;
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Failure {
    Schema(String),
    Dimension(String),
    Infeasible(String),
    NotScalar(String),
    Numerical(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Schema(_) => exit::SCHEMA,
            Failure::Dimension(_) => exit::DIMENSION,
            Failure::Infeasible(_) => exit::INFEASIBLE,
            Failure::NotScalar(_) => exit::NOT_SCALAR,
            Failure::Numerical(_) => exit::NUMERICAL,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (kind, msg) = match self {
            Failure::Schema(m) => ("schema error", m),
            Failure::Dimension(m) => ("dimension error", m),
            Failure::Infeasible(m) => ("infeasible point", m),
            Failure::NotScalar(m) => ("scalar objective required", m),
            Failure::Numerical(m) => ("numerical failure", m),
        };
        write!(f, "{}: {}", kind, msg)
    }
}

impl std::error::Error for Failure {}

impl From<qdcalc_core::Error> for Failure {
    fn from(e: qdcalc_core::Error) -> Self {
        use qdcalc_core::Error as E;
        let msg = e.to_string();
        match e {
            E::DimensionMismatch { .. } | E::UnsupportedDimension { .. } | E::NotScalar { .. } => Failure::Dimension(msg),
            E::Infeasible { .. } => Failure::Infeasible(msg),
            E::Empty(_) | E::NonFinite(_) | E::InvalidArgument(_) | E::BoundViolation { .. } => Failure::Schema(msg),
            E::Numerical(_) => Failure::Numerical(msg),
        }
    }
}
