//! `xi-scan`: the trial deficit `Ξ(ε)` on perturbed parabolas and its
//! second derivative at zero against the closed form.

use curvext::variational::{xi, xi_curvature, PerturbedParabola, XiControl};
use serde::{Deserialize, Serialize};

use super::RunOptions;
use crate::config::check_positive;
use crate::error::{config_err, CliResult};
use crate::report::{csv_artifact, Criterion, Relation, Report};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XiScanConfig {
    pub cases: Vec<XiCase>,
    /// Three increasing trial parameters for the second-derivative estimate.
    #[serde(default = "default_epsilons")]
    pub epsilons: [f64; 3],
    #[serde(default)]
    pub control: XiControl,
    /// Relative tolerance of the estimated `Ξ″(0)`.
    #[serde(default = "default_rel_tolerance")]
    pub rel_tolerance: f64,
    /// Extra trial parameters evaluated for plotting only.
    #[serde(default)]
    pub scan_epsilons: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XiCase {
    pub curve: PerturbedParabola,
    /// Whether the magnitude of `Ξ″(0)` is checked, not only its sign.
    #[serde(default = "yes")]
    pub check_magnitude: bool,
}

fn default_epsilons() -> [f64; 3] {
    [0.05, 0.1, 0.15]
}
fn default_rel_tolerance() -> f64 {
    0.1
}
fn yes() -> bool {
    true
}

#[derive(Debug, Serialize)]
struct CaseResult {
    lambda: f64,
    a: f64,
    satisfies_condition: bool,
    closed_form: f64,
    extrapolated: f64,
    relative_error: f64,
    quotients: [f64; 3],
    /// Plain second central difference of `Ξ` over the three parameters.
    central_difference: f64,
    central_difference_rel_error: f64,
    xi_mid: f64,
}

#[derive(Debug, Serialize)]
struct XiRow {
    case: usize,
    epsilon: f64,
    xi: f64,
    l2_term: f64,
    l6_term: f64,
    l6_error: f64,
}

pub fn run(cfg: &XiScanConfig, _opts: &RunOptions) -> CliResult<Report> {
    if cfg.cases.is_empty() {
        return config_err("cases must list at least one perturbed parabola");
    }
    check_positive("rel_tolerance", cfg.rel_tolerance)?;
    let mut criteria = Vec::new();
    let mut cases = Vec::new();
    let mut rows = Vec::new();
    for (i, case) in cfg.cases.iter().enumerate() {
        let pp = &case.curve;
        let c = xi_curvature(pp, cfg.epsilons, &cfg.control)?;
        let xi_mid = c.values[1].xi;
        for v in &c.values {
            rows.push(XiRow { case: i, epsilon: v.epsilon, xi: v.xi, l2_term: v.l2_term, l6_term: v.l6_term, l6_error: v.l6_error });
        }
        for &e in &cfg.scan_epsilons {
            let v = xi(pp, e, &cfg.control)?;
            rows.push(XiRow { case: i, epsilon: e, xi: v.xi, l2_term: v.l2_term, l6_term: v.l6_term, l6_error: v.l6_error });
        }
        if case.check_magnitude {
            criteria.push(Criterion::new(format!("xi2_case_{i}"), c.relative_error, Relation::Le, cfg.rel_tolerance));
        }
        criteria.push(Criterion::flag(
            format!("xi2_sign_case_{i}"),
            c.extrapolated.signum() == c.closed_form.signum(),
        ));
        if pp.satisfies_condition() {
            criteria.push(Criterion::new(format!("xi_negative_case_{i}"), xi_mid, Relation::Lt, 0.0));
        }
        cases.push(CaseResult {
            lambda: pp.lambda,
            a: pp.a,
            satisfies_condition: pp.satisfies_condition(),
            closed_form: c.closed_form,
            extrapolated: c.extrapolated,
            relative_error: c.relative_error,
            quotients: c.quotients,
            central_difference: c.central_difference,
            central_difference_rel_error: (c.central_difference - c.closed_form).abs() / c.closed_form.abs(),
            xi_mid,
        });
    }
    rows.sort_by(|a, b| a.case.cmp(&b.case).then(a.epsilon.total_cmp(&b.epsilon)));
    let artifacts =
        vec![csv_artifact("xi.csv", &["case", "epsilon", "xi", "l2_term", "l6_term", "l6_error"], rows.iter())?];
    let mut report = Report::new(&cases)?;
    report.criteria = criteria;
    report.artifacts = artifacts;
    Ok(report)
}
