//! `decompose`: greedy cap decomposition of a density with reconstruction,
//! sandwich, residual and location checks.

use curvext::caps::{decompose, DecomposeParams};
use curvext::convolution::DepositionControl;
use curvext::extension::foschi_constant;
use curvext::{Cap, CurveSpec, FunctionSpec, MeasureKind};
use serde::{Deserialize, Serialize};

use super::RunOptions;
use crate::config::{build_arc, build_function, default_arc_n, FUNCTION_HEADER};
use crate::error::CliResult;
use crate::report::{csv_artifact, Criterion, Relation, Report};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecomposeConfig {
    pub curve: CurveSpec,
    #[serde(default = "default_arc_n")]
    pub arc_n: usize,
    pub function: FunctionSpec,
    #[serde(default)]
    pub measure: MeasureKind,
    /// Stand-in for the sharp constant; `C_F` at the minimal curvature when absent.
    #[serde(default)]
    pub c_estimate: Option<f64>,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
    /// Relative residual `‖residual‖₂/‖f‖₂` at which extraction stops.
    #[serde(default = "default_residual_tol")]
    pub residual_tol: f64,
    #[serde(default = "default_deposition")]
    pub deposition: DepositionControl,
    /// Arclengths at which a recovered cap centre is expected, within one sample step.
    #[serde(default)]
    pub expected_centers: Vec<f64>,
}

fn default_max_steps() -> usize {
    20
}
fn default_residual_tol() -> f64 {
    1e-3
}
fn default_deposition() -> DepositionControl {
    DepositionControl { points: 200, cells: 64 }
}

#[derive(Debug, Serialize)]
struct StepRow {
    step: usize,
    cap: Cap,
    eps_star: f64,
    triple_norm: f64,
    lower: f64,
    upper: f64,
    l2_mass: f64,
}

#[derive(Debug, Serialize)]
struct Results {
    c_estimate: f64,
    input_l2: f64,
    residual_l2: f64,
    reconstruction_max_error: f64,
    sandwich_violations: usize,
    steps: Vec<StepRow>,
}

pub fn run(cfg: &DecomposeConfig, opts: &RunOptions) -> CliResult<Report> {
    let arc = build_arc(&cfg.curve, cfg.arc_n)?;
    let f = build_function(&arc, &cfg.function, cfg.measure)?;
    let c_estimate = cfg.c_estimate.unwrap_or_else(|| foschi_constant(arc.lambda_min()));
    let params = DecomposeParams {
        c_estimate,
        max_steps: cfg.max_steps,
        residual_tol: cfg.residual_tol,
        deposition: cfg.deposition,
    };
    let d = decompose(&f, &params)?;
    let rec = d.reconstruct()?;
    let reconstruction_max_error = rec.values().iter().zip(f.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let sandwich_violations =
        d.steps.iter().filter(|s| !(s.lower <= s.triple_norm && s.triple_norm <= s.upper)).count();
    let input_l2 = f.l2_sigma_norm();
    let residual_l2 = d.residual.l2_sigma_norm();
    let steps: Vec<StepRow> = d
        .steps
        .iter()
        .enumerate()
        .map(|(k, s)| StepRow {
            step: k + 1,
            cap: s.cap,
            eps_star: s.eps_star,
            triple_norm: s.triple_norm,
            lower: s.lower,
            upper: s.upper,
            l2_mass: s.l2_mass,
        })
        .collect();

    let mut criteria = vec![
        Criterion::new("reconstruction", reconstruction_max_error, Relation::Le, 0.0),
        Criterion::new("sandwich", sandwich_violations as f64, Relation::Le, 0.0),
        Criterion::new("residual", residual_l2 / input_l2, Relation::Le, cfg.residual_tol),
    ];
    let h = arc.max_arclength_step();
    for &c in &cfg.expected_centers {
        let miss = d.steps.iter().map(|s| (s.cap.center - c).abs()).fold(f64::INFINITY, f64::min);
        criteria.push(Criterion::new(format!("located_{c}"), miss, Relation::Le, h * (1.0 + 1e-9)));
    }

    let mut artifacts = vec![csv_artifact(
        "steps.csv",
        &["step", "center", "radius", "eps_star", "triple_norm", "lower", "upper", "l2_mass"],
        steps.iter().map(|s| (s.step, s.cap.center, s.cap.radius, s.eps_star, s.triple_norm, s.lower, s.upper, s.l2_mass)),
    )?];
    if opts.dump_fields {
        for (k, s) in d.steps.iter().enumerate() {
            artifacts.push(csv_artifact(format!("piece_{}.csv", k + 1), &FUNCTION_HEADER, s.piece.to_rows())?);
        }
        artifacts.push(csv_artifact("residual.csv", &FUNCTION_HEADER, d.residual.to_rows())?);
    }
    let mut report = Report::new(Results {
        c_estimate,
        input_l2,
        residual_l2,
        reconstruction_max_error,
        sandwich_violations,
        steps,
    })?;
    report.criteria = criteria;
    report.artifacts = artifacts;
    Ok(report)
}
