//! `triple-limit`: sup of the triple autoconvolution of shrinking cap
//! measures, extrapolated to zero radius and compared with `2π/(√3κ)`.

use std::f64::consts::PI;

use curvext::convolution::triple_autoconv_sup_limit;
use curvext::extension::foschi_constant;
use curvext::CurveSpec;
use serde::{Deserialize, Serialize};

use super::RunOptions;
use crate::config::{build_arc, check_positive};
use crate::error::CliResult;
use crate::report::{csv_artifact, Criterion, Relation, Report};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleConfig {
    pub curve: CurveSpec,
    #[serde(default = "default_n")]
    pub arc_n: usize,
    /// Arclength of the cap centre; the midpoint of the arc when absent.
    #[serde(default)]
    pub center: Option<f64>,
    /// Strictly decreasing cap radii, at least three.
    #[serde(default = "default_radii")]
    pub radii: Vec<f64>,
    /// Relative tolerance of the extrapolated sup against `2π/(√3κ)`.
    #[serde(default = "default_limit_tolerance")]
    pub limit_tolerance: f64,
    /// Relative tolerance of the implied operator norm against `C_F[κ]`.
    #[serde(default = "default_norm_tolerance")]
    pub norm_tolerance: f64,
}

fn default_n() -> usize {
    4001
}
fn default_radii() -> Vec<f64> {
    vec![0.2, 0.1, 0.05]
}
fn default_limit_tolerance() -> f64 {
    0.02
}
fn default_norm_tolerance() -> f64 {
    0.01
}

#[derive(Debug, Serialize)]
struct Results {
    center: f64,
    kappa: f64,
    limit: f64,
    limit_target: f64,
    limit_rel_error: f64,
    implied_norm: f64,
    norm_target: f64,
    norm_rel_error: f64,
    non_monotone: bool,
}

pub fn run(cfg: &TripleConfig, _opts: &RunOptions) -> CliResult<Report> {
    check_positive("limit_tolerance", cfg.limit_tolerance)?;
    check_positive("norm_tolerance", cfg.norm_tolerance)?;
    let arc = build_arc(&cfg.curve, cfg.arc_n)?;
    let center = cfg.center.unwrap_or(arc.length() / 2.0);
    let lim = triple_autoconv_sup_limit(&arc, center, &cfg.radii)?;
    let kappa = arc.kappa_at(center);
    let limit_target = 2.0 * PI / (3f64.sqrt() * kappa);
    let norm_target = foschi_constant(kappa);
    let results = Results {
        center,
        kappa,
        limit: lim.limit,
        limit_target,
        limit_rel_error: (lim.limit / limit_target - 1.0).abs(),
        implied_norm: lim.implied_norm,
        norm_target,
        norm_rel_error: (lim.implied_norm / norm_target - 1.0).abs(),
        non_monotone: lim.non_monotone,
    };
    let mut report = Report::new(&results)?;
    report.criteria = vec![
        Criterion::new("sup_limit", results.limit_rel_error, Relation::Le, cfg.limit_tolerance),
        Criterion::new("implied_norm", results.norm_rel_error, Relation::Le, cfg.norm_tolerance),
    ];
    report.artifacts = vec![csv_artifact(
        "sup_rows.csv",
        &["radius", "sup", "xi", "tau", "implied_norm"],
        lim.rows.iter(),
    )?];
    Ok(report)
}
