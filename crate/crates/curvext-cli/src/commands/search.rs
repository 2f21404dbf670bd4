//! `search`: damped ascent on the Rayleigh quotient from a seed density.

use curvext::extension::{extend, foschi_constant};
use curvext::search::{search, SearchParams, StopReason};
use curvext::{CurveSpec, FunctionSpec, MeasureKind, PlaneGrid};
use serde::{Deserialize, Serialize};

use super::RunOptions;
use crate::config::{build_arc, build_function, check_positive, default_arc_n, FIELD_HEADER, FUNCTION_HEADER};
use crate::error::CliResult;
use crate::report::{csv_artifact, Criterion, Relation, Report};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchConfig {
    pub curve: CurveSpec,
    #[serde(default = "default_arc_n")]
    pub arc_n: usize,
    #[serde(default)]
    pub measure: MeasureKind,
    /// Nonnegative starting density.
    pub seed_function: FunctionSpec,
    #[serde(default)]
    pub params: SearchParams,
    /// Value the search must reach up to `target_tolerance`; defaults to
    /// `C_F[μ]` for a parabola under the projection measure and is otherwise
    /// unchecked.
    #[serde(default)]
    pub target: Option<f64>,
    #[serde(default = "default_target_tolerance")]
    pub target_tolerance: f64,
    /// Plane grid for `--dump-fields`.
    #[serde(default = "default_dump_grid")]
    pub dump_grid: PlaneGrid,
}

fn default_target_tolerance() -> f64 {
    2e-3
}
fn default_dump_grid() -> PlaneGrid {
    PlaneGrid { x_min: -8.0, x_max: 8.0, t_min: -8.0, t_max: 8.0, nx: 81, nt: 81 }
}

#[derive(Debug, Serialize)]
struct Results {
    seed_rayleigh: f64,
    c_lower: f64,
    c_lower_error: f64,
    target: Option<f64>,
    iterations: usize,
    accepted: usize,
    stop: StopReason,
}

pub fn run(cfg: &SearchConfig, opts: &RunOptions) -> CliResult<Report> {
    check_positive("target_tolerance", cfg.target_tolerance)?;
    cfg.dump_grid.validate()?;
    let arc = build_arc(&cfg.curve, cfg.arc_n)?;
    let f0 = build_function(&arc, &cfg.seed_function, cfg.measure)?;
    let r = search(&f0, &cfg.params)?;
    let target = cfg.target.or(match (&cfg.curve, cfg.measure) {
        (CurveSpec::Parabola { mu, .. }, MeasureKind::Projection) => Some(foschi_constant(*mu)),
        _ => None,
    });
    let results = Results {
        seed_rayleigh: r.trace[0].rayleigh,
        c_lower: r.c_lower,
        c_lower_error: r.c_lower_error,
        target,
        iterations: r.trace.len() - 1,
        accepted: r.iterates.len() - 1,
        stop: r.stop,
    };
    let mut criteria = vec![Criterion::new("no_decrease_from_seed", r.c_lower - results.seed_rayleigh, Relation::Ge, 0.0)];
    if let Some(t) = target {
        criteria.push(Criterion::new("reaches_target", r.c_lower, Relation::Ge, t - cfg.target_tolerance));
    }
    let mut artifacts = vec![
        csv_artifact(
            "trace.csv",
            &["iter", "rayleigh", "l6_error_estimate", "damping", "accepted"],
            r.trace.iter(),
        )?,
        csv_artifact("best.csv", &FUNCTION_HEADER, r.best.to_rows())?,
    ];
    if opts.dump_fields {
        artifacts.push(csv_artifact("best_field.csv", &FIELD_HEADER, extend(&r.best, &cfg.dump_grid)?.field.to_rows())?);
    }
    let mut report = Report::new(results)?;
    report.criteria = criteria;
    report.artifacts = artifacts;
    Ok(report)
}
