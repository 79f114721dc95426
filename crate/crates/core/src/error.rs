use core::fmt;

/// Errors raised by the calculus, geometry and optimality routines.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Operand shapes disagree.
    DimensionMismatch {
        context: &'static str,
        expected: (usize, usize),
        found: (usize, usize),
    },
    /// A generator list, operand list or vector that must be nonempty was empty.
    Empty(&'static str),
    /// A NaN or infinite entry was supplied.
    NonFinite(&'static str),
    /// Enumeration would exceed the desk-scale cap.
    UnsupportedDimension {
        context: &'static str,
        dim: usize,
        limit: usize,
    },
    /// A generator of the outer quasidifferential escapes the box `[lower, upper]`.
    BoundViolation { row: usize, col: usize, value: f64 },
    /// The base point violates `g_i(x0) <= 0`.
    Infeasible { constraint: usize, value: f64 },
    /// The operation needs a scalar-valued (`m = 1`) map.
    NotScalar { m: usize },
    /// Parameter outside its admissible range.
    InvalidArgument(&'static str),
    /// The simplex routine did not terminate within its pivot budget.
    Numerical(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch {
                context,
                expected,
                found,
            } => write!(
                f,
                "dimension mismatch in {}: expected {}x{}, found {}x{}",
                context, expected.0, expected.1, found.0, found.1
            ),
            Error::Empty(what) => write!(f, "{} must be nonempty", what),
            Error::NonFinite(what) => write!(f, "{} contains a non-finite entry", what),
            Error::UnsupportedDimension {
                context,
                dim,
                limit,
            } => write!(
                f,
                "{}: dimension {} exceeds the enumeration limit {}",
                context, dim, limit
            ),
            Error::BoundViolation { row, col, value } => write!(
                f,
                "outer quasidifferential generator entry ({}, {}) = {} lies outside [lower, upper]",
                row, col, value
            ),
            Error::Infeasible { constraint, value } => write!(
                f,
                "base point is infeasible: constraint {} has value {} > 0",
                constraint, value
            ),
            Error::NotScalar { m } => {
                write!(f, "operation requires a scalar objective, got m = {}", m)
            }
            Error::InvalidArgument(what) => write!(f, "invalid argument: {}", what),
            Error::Numerical(what) => write!(f, "numerical failure: {}", what),
        }
    }
}

impl core::error::Error for Error {}
