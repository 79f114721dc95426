//! Expression trees for nonsmooth maps `R^n -> R^m`.
//!
//! Every node is total and locally Lipschitz, so each point is interior to
//! the domain and the one-sided directional derivative exists everywhere.

mod dini;
mod propagate;

use alloc::boxed::Box;
use alloc::vec::Vec;

pub use dini::{dini_fd, DiniEstimate, DEFAULT_STEPS};
pub use propagate::qd_at;

use crate::error::{Error, Result};
use crate::geometry::LinOp;

/// Smooth scalar functions applied coordinatewise, with exact derivatives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SmoothFn {
    Sin,
    Cos,
    Exp,
    Sqr,
    Tanh,
}

impl SmoothFn {
    pub const ALL: [SmoothFn; 5] = [SmoothFn::Sin, SmoothFn::Cos, SmoothFn::Exp, SmoothFn::Sqr, SmoothFn::Tanh];

    pub fn name(self) -> &'static str {
        match self {
            SmoothFn::Sin => "sin",
            SmoothFn::Cos => "cos",
            SmoothFn::Exp => "exp",
            SmoothFn::Sqr => "sqr",
            SmoothFn::Tanh => "tanh",
        }
    }

    pub fn from_name(name: &str) -> Option<SmoothFn> {
        SmoothFn::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn eval(self, t: f64) -> f64 {
        match self {
            SmoothFn::Sin => libm::sin(t),
            SmoothFn::Cos => libm::cos(t),
            SmoothFn::Exp => libm::exp(t),
            SmoothFn::Sqr => t * t,
            SmoothFn::Tanh => libm::tanh(t),
        }
    }

    pub fn derivative(self, t: f64) -> f64 {
        match self {
            SmoothFn::Sin => libm::cos(t),
            SmoothFn::Cos => -libm::sin(t),
            SmoothFn::Exp => libm::exp(t),
            SmoothFn::Sqr => 2.0 * t,
            SmoothFn::Tanh => {
                let th = libm::tanh(t);
                1.0 - th * th
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    /// The identity `x -> x` on `R^n`.
    Var { n: usize },
    /// The coordinate `x -> x_index`.
    Coord { n: usize, index: usize },
    Const { n: usize, value: Vec<f64> },
    /// `x -> A x + b`.
    Affine { a: LinOp, b: Vec<f64> },
    Smooth { func: SmoothFn, arg: Box<Expr> },
    Abs(Box<Expr>),
    Neg(Box<Expr>),
    Add(Vec<Expr>),
    /// `x -> diag ⊙ arg(x)`.
    ScaleConst { diag: Vec<f64>, arg: Box<Expr> },
    /// `x -> g(x) ⊙ f(x)`, with `g` read as a diagonal multiplier.
    MulScalar { g: Box<Expr>, f: Box<Expr> },
    Max(Vec<Expr>),
    Min(Vec<Expr>),
    /// `x -> outer(inner(x))`.
    Compose { outer: Box<Expr>, inner: Box<Expr> },
}

/// Input and output dimension of an expression.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dims {
    pub input: usize,
    pub output: usize,
}

impl Expr {
    pub fn var(n: usize) -> Expr {
        Expr::Var { n }
    }

    pub fn coord(n: usize, index: usize) -> Expr {
        Expr::Coord { n, index }
    }

    pub fn constant(n: usize, value: Vec<f64>) -> Expr {
        Expr::Const { n, value }
    }

    pub fn affine(a: LinOp, b: Vec<f64>) -> Expr {
        Expr::Affine { a, b }
    }

    pub fn smooth(func: SmoothFn, arg: Expr) -> Expr {
        Expr::Smooth {
            func,
            arg: Box::new(arg),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn abs(arg: Expr) -> Expr {
        Expr::Abs(Box::new(arg))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(arg: Expr) -> Expr {
        Expr::Neg(Box::new(arg))
    }

    pub fn scale(diag: Vec<f64>, arg: Expr) -> Expr {
        Expr::ScaleConst {
            diag,
            arg: Box::new(arg),
        }
    }

    pub fn mul(g: Expr, f: Expr) -> Expr {
        Expr::MulScalar {
            g: Box::new(g),
            f: Box::new(f),
        }
    }

    pub fn compose(outer: Expr, inner: Expr) -> Expr {
        Expr::Compose {
            outer: Box::new(outer),
            inner: Box::new(inner),
        }
    }

    /// Validates the tree and returns its dimensions.
    pub fn dims(&self) -> Result<Dims> {
        match self {
            Expr::Var { n } => {
                nonzero(*n, "var dimension")?;
                Ok(Dims { input: *n, output: *n })
            }
            Expr::Coord { n, index } => {
                nonzero(*n, "coord dimension")?;
                if index >= n {
                    return Err(Error::InvalidArgument("coordinate index out of range"));
                }
                Ok(Dims { input: *n, output: 1 })
            }
            Expr::Const { n, value } => {
                nonzero(*n, "const input dimension")?;
                nonzero(value.len(), "const value")?;
                finite(value, "const value")?;
                Ok(Dims {
                    input: *n,
                    output: value.len(),
                })
            }
            Expr::Affine { a, b } => {
                if b.len() != a.rows() {
                    return Err(mismatch("affine offset", (a.rows(), 1), (b.len(), 1)));
                }
                finite(b, "affine offset")?;
                Ok(Dims {
                    input: a.cols(),
                    output: a.rows(),
                })
            }
            Expr::Smooth { arg, .. } | Expr::Abs(arg) | Expr::Neg(arg) => arg.dims(),
            Expr::ScaleConst { diag, arg } => {
                let d = arg.dims()?;
                if diag.len() != d.output {
                    return Err(mismatch("scale diagonal", (d.output, 1), (diag.len(), 1)));
                }
                finite(diag, "scale diagonal")?;
                Ok(d)
            }
            Expr::MulScalar { g, f } => {
                let dg = g.dims()?;
                let df = f.dims()?;
                if dg != df {
                    return Err(mismatch("mul operands", (df.output, df.input), (dg.output, dg.input)));
                }
                Ok(df)
            }
            Expr::Add(args) | Expr::Max(args) | Expr::Min(args) => {
                let first = args.first().ok_or(Error::Empty("operand list"))?.dims()?;
                for a in &args[1..] {
                    let d = a.dims()?;
                    if d != first {
                        return Err(mismatch("operand list", (first.output, first.input), (d.output, d.input)));
                    }
                }
                Ok(first)
            }
            Expr::Compose { outer, inner } => {
                let di = inner.dims()?;
                let dout = outer.dims()?;
                if dout.input != di.output {
                    return Err(mismatch("compose", (di.output, 1), (dout.input, 1)));
                }
                Ok(Dims {
                    input: di.input,
                    output: dout.output,
                })
            }
        }
    }

    /// True when the tree uses only affine pieces, abs, neg, sums, constant
    /// scalings, max, min and compositions of these.
    pub fn is_piecewise_linear(&self) -> bool {
        match self {
            Expr::Var { .. } | Expr::Coord { .. } | Expr::Const { .. } | Expr::Affine { .. } => true,
            Expr::Smooth { .. } | Expr::MulScalar { .. } => false,
            Expr::Abs(a) | Expr::Neg(a) | Expr::ScaleConst { arg: a, .. } => a.is_piecewise_linear(),
            Expr::Add(args) | Expr::Max(args) | Expr::Min(args) => args.iter().all(Expr::is_piecewise_linear),
            Expr::Compose { outer, inner } => outer.is_piecewise_linear() && inner.is_piecewise_linear(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Expr::Var { .. } | Expr::Coord { .. } | Expr::Const { .. } | Expr::Affine { .. } => 1,
            Expr::Smooth { arg, .. } | Expr::Abs(arg) | Expr::Neg(arg) | Expr::ScaleConst { arg, .. } => {
                1 + arg.depth()
            }
            Expr::MulScalar { g, f } => 1 + g.depth().max(f.depth()),
            Expr::Add(args) | Expr::Max(args) | Expr::Min(args) => {
                1 + args.iter().map(Expr::depth).max().unwrap_or(0)
            }
            Expr::Compose { outer, inner } => outer.depth() + inner.depth(),
        }
    }

    /// Node kind as used in the JSON encoding.
    pub fn kind(&self) -> &'static str {
        match self {
            Expr::Var { .. } => "var",
            Expr::Coord { .. } => "coord",
            Expr::Const { .. } => "const",
            Expr::Affine { .. } => "affine",
            Expr::Smooth { .. } => "smooth",
            Expr::Abs(_) => "abs",
            Expr::Neg(_) => "neg",
            Expr::Add(_) => "add",
            Expr::ScaleConst { .. } => "scale",
            Expr::MulScalar { .. } => "mul",
            Expr::Max(_) => "max",
            Expr::Min(_) => "min",
            Expr::Compose { .. } => "compose",
        }
    }
}

/// Evaluates `e` at `x`.
pub fn eval(e: &Expr, x: &[f64]) -> Result<Vec<f64>> {
    let d = e.dims()?;
    check_point(x, d.input)?;
    Ok(eval_unchecked(e, x))
}

pub(crate) fn check_point(x: &[f64], n: usize) -> Result<()> {
    if x.len() != n {
        return Err(mismatch("evaluation point", (n, 1), (x.len(), 1)));
    }
    finite(x, "evaluation point")
}

pub(crate) fn eval_unchecked(e: &Expr, x: &[f64]) -> Vec<f64> {
    match e {
        Expr::Var { .. } => x.to_vec(),
        Expr::Coord { index, .. } => alloc::vec![x[*index]],
        Expr::Const { value, .. } => value.clone(),
        Expr::Affine { a, b } => (0..a.rows())
            .map(|i| crate::geometry::dot(a.row(i), x) + b[i])
            .collect(),
        Expr::Smooth { func, arg } => eval_unchecked(arg, x).into_iter().map(|t| func.eval(t)).collect(),
        Expr::Abs(arg) => eval_unchecked(arg, x).into_iter().map(libm::fabs).collect(),
        Expr::Neg(arg) => eval_unchecked(arg, x).into_iter().map(|t| -t).collect(),
        Expr::Add(args) => {
            let mut acc = eval_unchecked(&args[0], x);
            for a in &args[1..] {
                for (s, v) in acc.iter_mut().zip(eval_unchecked(a, x)) {
                    *s += v;
                }
            }
            acc
        }
        Expr::ScaleConst { diag, arg } => eval_unchecked(arg, x)
            .into_iter()
            .zip(diag)
            .map(|(v, d)| v * d)
            .collect(),
        Expr::MulScalar { g, f } => eval_unchecked(g, x)
            .into_iter()
            .zip(eval_unchecked(f, x))
            .map(|(a, b)| a * b)
            .collect(),
        Expr::Max(args) => fold_lattice(args, x, f64::max),
        Expr::Min(args) => fold_lattice(args, x, f64::min),
        Expr::Compose { outer, inner } => {
            let u = eval_unchecked(inner, x);
            eval_unchecked(outer, &u)
        }
    }
}

fn fold_lattice(args: &[Expr], x: &[f64], op: fn(f64, f64) -> f64) -> Vec<f64> {
    let mut acc = eval_unchecked(&args[0], x);
    for a in &args[1..] {
        for (s, v) in acc.iter_mut().zip(eval_unchecked(a, x)) {
            *s = op(*s, v);
        }
    }
    acc
}

fn nonzero(v: usize, what: &'static str) -> Result<()> {
    if v == 0 {
        Err(Error::Empty(what))
    } else {
        Ok(())
    }
}

fn finite(v: &[f64], what: &'static str) -> Result<()> {
    if v.iter().all(|t| t.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

fn mismatch(context: &'static str, expected: (usize, usize), found: (usize, usize)) -> Error {
    Error::DimensionMismatch {
        context,
        expected,
        found,
    }
}
