//! `compare`: lower bound for the sharp constant of an arc against the
//! parabola constant at the seed curvature.

use curvext::variational::CompareParams;
use curvext::CurveSpec;
use serde::{Deserialize, Serialize};

use super::RunOptions;
use crate::config::{build_arc, check_positive, default_arc_n};
use crate::error::CliResult;
use crate::report::{csv_artifact, Criterion, Relation, Report};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareConfig {
    pub curve: CurveSpec,
    #[serde(default = "default_arc_n")]
    pub arc_n: usize,
    #[serde(default)]
    pub params: CompareParams,
    /// The margin must exceed this multiple of the combined error.
    #[serde(default = "default_margin_factor")]
    pub margin_factor: f64,
}

fn default_margin_factor() -> f64 {
    3.0
}

pub fn run(cfg: &CompareConfig, _opts: &RunOptions) -> CliResult<Report> {
    check_positive("margin_factor", cfg.margin_factor)?;
    let arc = build_arc(&cfg.curve, cfg.arc_n)?;
    let r = curvext::variational::compare_constants(arc, &cfg.params)?;
    let artifact = csv_artifact(
        "compare.csv",
        &[
            "lambda_min",
            "seed_center",
            "lambda",
            "k2_holds",
            "c_f_lambda",
            "seed_rayleigh",
            "c_hat_lower",
            "tail_error",
            "refinement_gap",
            "combined_error",
            "margin",
            "strict",
            "iterations",
        ],
        [&r],
    )?;
    let mut report = Report::new(&r)?;
    report.criteria = vec![Criterion::new("strict_margin", r.margin, Relation::Gt, cfg.margin_factor * r.combined_error)];
    report.artifacts = vec![artifact];
    Ok(report)
}
