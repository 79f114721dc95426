use std::path::Path;

use log::{debug, info};
use qdcalc_core::expr::eval;
use qdcalc_core::optimality::{
    check_combined, check_generalized, check_inequality_constrained, check_set_constrained, check_unconstrained,
    quasiregularity_diagnostic, GeneralizedPoint,
};
use qdcalc_core::solver::{minimize, SolverParams};
use qdcalc_core::{dini_fd, qd_at, Constraint, ConstraintSystem, Expr, Tolerance};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::problem::{Compiled, Options, ProblemFile};
use crate::report::{
    CheckMode, CommandEcho, Diagnostics, FdResidual, QdEntry, RegularityJson, Report, SettingsEcho, SolverSummary,
    VerdictReport,
};
use crate::{exit, Failure};

/// Number of random directions in the finite-difference diagnostic.
pub const FD_DIRECTIONS: usize = 20;

/// Powers of two keep `x + t h` exact for dyadic data, so piecewise-linear
/// residuals stay at rounding level.
pub const FD_STEPS: [f64; 4] = [1.0 / 128.0, 1.0 / 1024.0, 1.0 / 16384.0, 1.0 / 131072.0];

/// Command-line overrides; they take precedence over the problem's `options`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub tol_geom: Option<f64>,
    pub tol_active: Option<f64>,
    pub max_iters: Option<usize>,
    pub step_init: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Settings {
    pub tol: Tolerance,
    pub params: SolverParams,
    pub seed: u64,
}

impl Settings {
    pub fn resolve(options: &Options, o: &Overrides) -> Result<Settings, Failure> {
        let dt = Tolerance::default();
        let dp = SolverParams::default();
        let tol = Tolerance {
            eps_geom: o.tol_geom.or(options.eps_geom).unwrap_or(dt.eps_geom),
            eps_prune: options.eps_prune.unwrap_or(dt.eps_prune),
            eps_active: o.tol_active.or(options.eps_active).unwrap_or(dt.eps_active),
        };
        let params = SolverParams {
            max_iters: o.max_iters.or(options.max_iters).unwrap_or(dp.max_iters),
            step_init: o.step_init.or(options.step_init).unwrap_or(dp.step_init),
            armijo_c: options.armijo_c.unwrap_or(dp.armijo_c),
            shrink: options.shrink.unwrap_or(dp.shrink),
            stop_dist: options.stop_dist.unwrap_or(dp.stop_dist),
        };
        tol.validate()?;
        params.validate()?;
        Ok(Settings {
            tol,
            params,
            seed: o.seed.or(options.seed).unwrap_or(0),
        })
    }

    fn echo(&self) -> SettingsEcho {
        SettingsEcho {
            eps_geom: self.tol.eps_geom,
            eps_prune: self.tol.eps_prune,
            eps_active: self.tol.eps_active,
            max_iters: self.params.max_iters,
            step_init: self.params.step_init,
            armijo_c: self.params.armijo_c,
            shrink: self.params.shrink,
            stop_dist: self.params.stop_dist,
            seed: self.seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub report: Report,
    pub exit_code: i32,
}

/// Reads, parses and compiles a problem file.
pub fn load(path: &Path) -> Result<(ProblemFile, Compiled), Failure> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Failure::Schema(format!("cannot read {}: {}", path.display(), e)))?;
    let problem = ProblemFile::parse(&text)?;
    let compiled = problem.compile()?;
    info!("loaded {} (n = {}, m = {})", path.display(), compiled.n, compiled.m);
    Ok((problem, compiled))
}

fn echo(name: &str, file: &str, c: &Compiled, point: &[f64], s: &Settings) -> CommandEcho {
    CommandEcho {
        name: name.to_string(),
        file: file.to_string(),
        n: c.n,
        m: c.m,
        point: point.to_vec(),
        settings: s.echo(),
    }
}

fn label(i: usize) -> String {
    format!("constraint[{}]", i)
}

fn constraint_values(c: &Compiled, x: &[f64], tol: &Tolerance) -> Result<Vec<Constraint>, Failure> {
    c.constraints
        .iter()
        .map(|g| Ok(Constraint::new(qd_at(g, x, tol)?, eval(g, x)?[0])?))
        .collect()
}

/// Nonzero directions with entries in `{-1, -7/8, ..., 1}`.
fn fd_directions(n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dirs = Vec::with_capacity(FD_DIRECTIONS);
    while dirs.len() < FD_DIRECTIONS {
        let h: Vec<f64> = (0..n).map(|_| rng.gen_range(-8i32..=8) as f64 / 8.0).collect();
        if h.iter().any(|v| *v != 0.0) {
            dirs.push(h);
        }
    }
    dirs
}

fn fd_residual(function: String, e: &Expr, x: &[f64], dirs: &[Vec<f64>], tol: &Tolerance) -> Result<FdResidual, Failure> {
    let q = qd_at(e, x, tol)?;
    let mut worst = 0.0f64;
    for h in dirs {
        let got = q.eval_dir(h)?;
        let fd = dini_fd(e, x, h, &FD_STEPS)?;
        for (a, b) in got.iter().zip(&fd.value) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok(FdResidual {
        function,
        directions: dirs.len(),
        piecewise_linear: e.is_piecewise_linear(),
        max_residual: worst,
    })
}

/// Quasidifferentials of the objective and each constraint at the point, with
/// finite-difference residuals over [`FD_DIRECTIONS`] seeded directions.
pub fn cmd_qd(c: &Compiled, file: &str, point: Option<&[f64]>, s: &Settings) -> Result<Outcome, Failure> {
    let x = point.unwrap_or(c.point());
    if x.len() != c.n {
        return Err(Failure::Dimension(format!("point has length {}, expected n = {}", x.len(), c.n)));
    }
    let dirs = fd_directions(c.n, s.seed);
    let mut quasidifferentials = vec![QdEntry::new("objective".into(), x, eval(&c.objective, x)?, &qd_at(&c.objective, x, &s.tol)?)];
    let mut fd_residuals = vec![fd_residual("objective".into(), &c.objective, x, &dirs, &s.tol)?];
    for (i, g) in c.constraints.iter().enumerate() {
        quasidifferentials.push(QdEntry::new(label(i), x, eval(g, x)?, &qd_at(g, x, &s.tol)?));
        fd_residuals.push(fd_residual(label(i), g, x, &dirs, &s.tol)?);
    }
    for r in &fd_residuals {
        info!("{}: fd residual {:e}", r.function, r.max_residual);
    }
    Ok(Outcome {
        report: Report {
            command: echo("qd", file, c, x, s),
            quasidifferentials,
            verdict: None,
            solver: None,
            diagnostics: Diagnostics {
                regularity: None,
                fd_residuals,
            },
        },
        exit_code: exit::OK,
    })
}

/// Checks the necessary condition selected by the fields present: multi-point
/// when `generalized_points` is given, else inequality, set or combined
/// according to `constraints` and `set_cone`.
pub fn cmd_check(c: &Compiled, file: &str, s: &Settings) -> Result<Outcome, Failure> {
    let x = c.point();
    let tol = &s.tol;
    let mut quasidifferentials = Vec::new();
    let mut regularity = None;
    let verdict = if c.generalized {
        if !c.constraints.is_empty() {
            return Err(Failure::Schema("generalized_points cannot be combined with constraints".into()));
        }
        let mut points = Vec::with_capacity(c.points.len());
        for p in &c.points {
            let qd = qd_at(&c.objective, p, tol)?;
            let value = eval(&c.objective, p)?;
            quasidifferentials.push(QdEntry::new("objective".into(), p, value.clone(), &qd));
            points.push(GeneralizedPoint {
                qd,
                value,
                cone: c.set_cone.clone(),
            });
        }
        let v = check_generalized(&points, tol)?;
        VerdictReport::new(CheckMode::Generalized, Vec::new(), &v)
    } else {
        let qf = qd_at(&c.objective, x, tol)?;
        quasidifferentials.push(QdEntry::new("objective".into(), x, eval(&c.objective, x)?, &qf));
        let constraints = constraint_values(c, x, tol)?;
        for (i, g) in constraints.iter().enumerate() {
            quasidifferentials.push(QdEntry::new(label(i), x, vec![g.value], &g.qd));
        }
        let cs = ConstraintSystem::new(constraints, c.set_cone.clone());
        let has_constraints = !cs.constraints.is_empty();
        let (mode, v) = match (has_constraints, &c.set_cone) {
            (true, Some(_)) => (CheckMode::Combined, check_combined(&qf, &cs, tol)?),
            (true, None) => (CheckMode::Inequality, check_inequality_constrained(&qf, &cs, tol)?),
            (false, Some(k)) => (CheckMode::Set, check_set_constrained(&qf, k, tol)?),
            (false, None) => (CheckMode::Unconstrained, check_unconstrained(&qf, tol)?),
        };
        let active = cs.active(tol.eps_active);
        if has_constraints {
            let subset: Vec<Constraint> = active.iter().map(|&i| cs.constraints[i].clone()).collect();
            let r = quasiregularity_diagnostic(&subset, None, None, tol)?;
            regularity = Some(RegularityJson::new(active.clone(), &r));
        }
        VerdictReport::new(mode, active, &v)
    };
    info!("{} condition {}", verdict.mode.as_str(), if verdict.holds { "holds" } else { "fails" });
    let exit_code = if verdict.holds { exit::OK } else { exit::FAILS };
    Ok(Outcome {
        report: Report {
            command: echo("check", file, c, x, s),
            quasidifferentials,
            verdict: Some(verdict),
            solver: None,
            diagnostics: Diagnostics {
                regularity,
                fd_residuals: Vec::new(),
            },
        },
        exit_code,
    })
}

/// Runs the descent method from `point` and checks the unconstrained condition
/// at the final iterate. The exit code is 0 whatever the solver status.
pub fn cmd_minimize(c: &Compiled, file: &str, s: &Settings) -> Result<Outcome, Failure> {
    if c.m != 1 {
        return Err(Failure::NotScalar(format!("minimize needs m = 1, got m = {}", c.m)));
    }
    if !c.constraints.is_empty() || c.set_cone.is_some() || c.generalized {
        return Err(Failure::Schema("minimize handles unconstrained problems only".into()));
    }
    let x = c.point();
    let trace = minimize(&c.objective, x, &s.params, &s.tol)?;
    for (k, it) in trace.iterates.iter().enumerate() {
        debug!("iterate {}: f = {:e}, distance = {:e}, step = {:e}", k, it.value, it.distance, it.step);
    }
    let summary = SolverSummary::from(&trace);
    info!("solver stopped after {} steps: {}", summary.steps, summary.status);
    let last = &summary.final_point;
    let q = qd_at(&c.objective, last, &s.tol)?;
    let v = check_unconstrained(&q, &s.tol)?;
    Ok(Outcome {
        report: Report {
            command: echo("minimize", file, c, x, s),
            quasidifferentials: vec![QdEntry::new("objective".into(), last, vec![summary.final_value], &q)],
            verdict: Some(VerdictReport::new(CheckMode::Unconstrained, Vec::new(), &v)),
            solver: Some(summary),
            diagnostics: Diagnostics::default(),
        },
        exit_code: exit::OK,
    })
}
