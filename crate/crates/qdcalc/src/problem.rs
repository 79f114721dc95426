//! Problem files: `min f(x)` subject to optional `g_i(x) <= 0` and a set
//! constraint given by its cone of feasible directions at the point.

use qdcalc_core::expr::SmoothFn;
use qdcalc_core::{DirectionCone, Expr, LinOp};
use serde::{Deserialize, Serialize};

use crate::Failure;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub n: usize,
    pub m: usize,
    pub objective: ExprJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraints: Option<Vec<ExprJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set_cone: Option<SetCone>,
    pub point: Vec<f64>,
    /// Further points of a multi-point check; `point` is always the first.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generalized_points: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub options: Options,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetCone {
    pub generators: Vec<Vec<f64>>,
}

/// Overrides of the default tolerances and solver parameters.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    pub eps_geom: Option<f64>,
    pub eps_prune: Option<f64>,
    pub eps_active: Option<f64>,
    pub max_iters: Option<usize>,
    pub step_init: Option<f64>,
    pub armijo_c: Option<f64>,
    pub shrink: Option<f64>,
    pub stop_dist: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothName {
    Sin,
    Cos,
    Exp,
    Sqr,
    Tanh,
}

impl From<SmoothName> for SmoothFn {
    fn from(s: SmoothName) -> Self {
        match s {
            SmoothName::Sin => SmoothFn::Sin,
            SmoothName::Cos => SmoothFn::Cos,
            SmoothName::Exp => SmoothFn::Exp,
            SmoothName::Sqr => SmoothFn::Sqr,
            SmoothName::Tanh => SmoothFn::Tanh,
        }
    }
}

/// Expression tree. The input dimension is inherited from the context: `n`
/// at the root, and the output dimension of `inner` for the `outer` side of a
/// composition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExprJson {
    Var {},
    Coord {
        index: usize,
    },
    Const {
        value: Vec<f64>,
    },
    /// `A x + b`; `b` defaults to zero.
    Affine {
        a: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        b: Option<Vec<f64>>,
    },
    Smooth {
        #[serde(rename = "fn")]
        func: SmoothName,
        arg: Box<ExprJson>,
    },
    Abs {
        arg: Box<ExprJson>,
    },
    Neg {
        arg: Box<ExprJson>,
    },
    Add {
        args: Vec<ExprJson>,
    },
    Max {
        args: Vec<ExprJson>,
    },
    Min {
        args: Vec<ExprJson>,
    },
    Scale {
        diag: Vec<f64>,
        arg: Box<ExprJson>,
    },
    Mul {
        g: Box<ExprJson>,
        f: Box<ExprJson>,
    },
    Compose {
        outer: Box<ExprJson>,
        inner: Box<ExprJson>,
    },
}

impl ExprJson {
    /// Builds the expression on `R^n`.
    pub fn build(&self, n: usize) -> Result<Expr, Failure> {
        let e = match self {
            ExprJson::Var {} => Expr::var(n),
            ExprJson::Coord { index } => {
                if *index >= n {
                    return Err(Failure::Dimension(format!("coord index {} out of range for n = {}", index, n)));
                }
                Expr::coord(n, *index)
            }
            ExprJson::Const { value } => Expr::constant(n, value.clone()),
            ExprJson::Affine { a, b } => {
                if a.is_empty() {
                    return Err(Failure::Schema("affine matrix has no rows".into()));
                }
                if let Some(row) = a.iter().find(|r| r.len() != n) {
                    return Err(Failure::Dimension(format!(
                        "affine row has {} entries, expected n = {}",
                        row.len(),
                        n
                    )));
                }
                let b = b.clone().unwrap_or_else(|| vec![0.0; a.len()]);
                Expr::affine(LinOp::from_rows(a)?, b)
            }
            ExprJson::Smooth { func, arg } => Expr::smooth((*func).into(), arg.build(n)?),
            ExprJson::Abs { arg } => Expr::abs(arg.build(n)?),
            ExprJson::Neg { arg } => Expr::neg(arg.build(n)?),
            ExprJson::Add { args } => Expr::Add(build_all(args, n)?),
            ExprJson::Max { args } => Expr::Max(build_all(args, n)?),
            ExprJson::Min { args } => Expr::Min(build_all(args, n)?),
            ExprJson::Scale { diag, arg } => Expr::scale(diag.clone(), arg.build(n)?),
            ExprJson::Mul { g, f } => Expr::mul(g.build(n)?, f.build(n)?),
            ExprJson::Compose { outer, inner } => {
                let inner = inner.build(n)?;
                let k = inner.dims()?.output;
                Expr::compose(outer.build(k)?, inner)
            }
        };
        e.dims()?;
        Ok(e)
    }
}

fn build_all(args: &[ExprJson], n: usize) -> Result<Vec<Expr>, Failure> {
    if args.is_empty() {
        return Err(Failure::Schema("operand list is empty".into()));
    }
    args.iter().map(|a| a.build(n)).collect()
}

/// A problem with its expressions built and every dimension checked.
#[derive(Clone, Debug)]
pub struct Compiled {
    pub n: usize,
    pub m: usize,
    pub objective: Expr,
    pub constraints: Vec<Expr>,
    pub set_cone: Option<DirectionCone>,
    /// `point` followed by any generalized points.
    pub points: Vec<Vec<f64>>,
    pub generalized: bool,
}

impl Compiled {
    pub fn point(&self) -> &[f64] {
        &self.points[0]
    }
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<ProblemFile, Failure> {
        serde_json::from_str(text).map_err(|e| Failure::Schema(e.to_string()))
    }

    pub fn compile(&self) -> Result<Compiled, Failure> {
        let (n, m) = (self.n, self.m);
        if n == 0 || m == 0 {
            return Err(Failure::Dimension("n and m must be positive".into()));
        }
        let objective = self.objective.build(n)?;
        let out = objective.dims()?.output;
        if out != m {
            return Err(Failure::Dimension(format!("objective has {} outputs, expected m = {}", out, m)));
        }
        let mut constraints = Vec::new();
        for (i, c) in self.constraints.iter().flatten().enumerate() {
            let e = c.build(n)?;
            let out = e.dims()?.output;
            if out != 1 {
                return Err(Failure::Dimension(format!("constraint {} has {} outputs, expected 1", i, out)));
            }
            constraints.push(e);
        }
        let set_cone = match &self.set_cone {
            Some(c) => Some(DirectionCone::new(n, c.generators.clone())?),
            None => None,
        };
        let mut points = vec![self.point.clone()];
        points.extend(self.generalized_points.iter().flatten().cloned());
        for (i, p) in points.iter().enumerate() {
            if p.len() != n {
                return Err(Failure::Dimension(format!("point {} has length {}, expected n = {}", i, p.len(), n)));
            }
        }
        Ok(Compiled {
            n,
            m,
            objective,
            constraints,
            set_cone,
            points,
            generalized: self.generalized_points.is_some(),
        })
    }
}
