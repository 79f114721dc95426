//! Machine-readable command reports.

use qdcalc_core::optimality::{CertificateEntry, RegularityReport, Witness};
use qdcalc_core::solver::SolverTrace;
use qdcalc_core::{OperatorPolytope, QuasiDiff, Verdict};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub command: CommandEcho,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub quasidifferentials: Vec<QdEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<VerdictReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverSummary>,
    pub diagnostics: Diagnostics,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommandEcho {
    pub name: String,
    pub file: String,
    pub n: usize,
    pub m: usize,
    pub point: Vec<f64>,
    pub settings: SettingsEcho,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SettingsEcho {
    pub eps_geom: f64,
    pub eps_prune: f64,
    pub eps_active: f64,
    pub max_iters: usize,
    pub step_init: f64,
    pub armijo_c: f64,
    pub shrink: f64,
    pub stop_dist: f64,
    pub seed: u64,
}

/// Generators are `m x n` matrices given by rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QdEntry {
    /// `objective` or `constraint[i]`.
    pub function: String,
    pub point: Vec<f64>,
    pub value: Vec<f64>,
    pub subd: Vec<Vec<Vec<f64>>>,
    pub supd: Vec<Vec<Vec<f64>>>,
}

impl QdEntry {
    pub fn new(function: String, point: &[f64], value: Vec<f64>, q: &QuasiDiff) -> Self {
        QdEntry {
            function,
            point: point.to_vec(),
            value,
            subd: matrices(q.subd()),
            supd: matrices(q.supd()),
        }
    }
}

fn matrices(p: &OperatorPolytope) -> Vec<Vec<Vec<f64>>> {
    p.generators().iter().map(|g| g.to_rows()).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckMode {
    Unconstrained,
    Inequality,
    Set,
    Combined,
    Generalized,
}

impl CheckMode {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckMode::Unconstrained => "unconstrained",
            CheckMode::Inequality => "inequality",
            CheckMode::Set => "set",
            CheckMode::Combined => "combined",
            CheckMode::Generalized => "generalized",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerdictReport {
    pub mode: CheckMode,
    pub holds: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub active_constraints: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Vec<CertificateReport>>,
}

impl VerdictReport {
    pub fn new(mode: CheckMode, active_constraints: Vec<usize>, v: &Verdict) -> Self {
        VerdictReport {
            mode,
            holds: v.holds,
            active_constraints,
            witness: v.witness.as_ref().map(WitnessReport::from),
            certificate: v
                .certificate
                .as_ref()
                .map(|c| c.entries.iter().map(CertificateReport::from).collect()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessReport {
    pub coordinate: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<usize>,
    pub generator: Vec<f64>,
    pub direction: Vec<f64>,
    pub derivative: Vec<f64>,
}

impl From<&Witness> for WitnessReport {
    fn from(w: &Witness) -> Self {
        WitnessReport {
            coordinate: w.coordinate,
            point: w.point,
            generator: w.generator.clone(),
            direction: w.direction.clone(),
            derivative: w.derivative.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateReport {
    pub coordinate: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<usize>,
    pub generator: Vec<f64>,
    pub weights: Vec<f64>,
    pub gamma: Vec<f64>,
    pub lambda: Vec<f64>,
    pub residual: f64,
}

impl From<&CertificateEntry> for CertificateReport {
    fn from(c: &CertificateEntry) -> Self {
        CertificateReport {
            coordinate: c.coordinate,
            point: c.point,
            generator: c.generator.clone(),
            weights: c.weights.clone(),
            gamma: c.gamma.clone(),
            lambda: c.lambda.clone(),
            residual: c.residual,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Diagnostics {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regularity: Option<RegularityJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fd_residuals: Vec<FdResidual>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegularityJson {
    pub regular: bool,
    /// Constraint indices the diagnostic ran on.
    pub constraints: Vec<usize>,
    pub entries: Vec<RegularityEntryJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegularityEntryJson {
    pub operator: usize,
    pub mask: Vec<bool>,
    pub intersects: bool,
    pub gap: f64,
}

impl RegularityJson {
    pub fn new(constraints: Vec<usize>, r: &RegularityReport) -> Self {
        RegularityJson {
            regular: r.regular,
            constraints,
            entries: r
                .entries
                .iter()
                .map(|e| RegularityEntryJson {
                    operator: e.operator,
                    mask: e.mask.mask().to_vec(),
                    intersects: e.intersects,
                    gap: e.gap,
                })
                .collect(),
        }
    }
}

/// Largest `|qd_eval_dir - dini_fd|` over the sampled directions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FdResidual {
    pub function: String,
    pub directions: usize,
    pub piecewise_linear: bool,
    pub max_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSummary {
    pub status: String,
    pub steps: usize,
    pub initial_value: f64,
    pub final_value: f64,
    pub final_point: Vec<f64>,
    /// Distance from the farthest supd generator to subd at the final point.
    pub final_distance: f64,
    pub iterates: Vec<IterateReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IterateReport {
    pub x: Vec<f64>,
    pub value: f64,
    pub distance: f64,
    pub step: f64,
}

impl From<&SolverTrace> for SolverSummary {
    fn from(t: &SolverTrace) -> Self {
        let last = t.last();
        SolverSummary {
            status: t.status.as_str().to_string(),
            steps: t.steps(),
            initial_value: t.iterates[0].value,
            final_value: last.value,
            final_point: last.x.clone(),
            final_distance: last.distance,
            iterates: t
                .iterates
                .iter()
                .map(|i| IterateReport {
                    x: i.x.clone(),
                    value: i.value,
                    distance: i.distance,
                    step: i.step,
                })
                .collect(),
        }
    }
}
