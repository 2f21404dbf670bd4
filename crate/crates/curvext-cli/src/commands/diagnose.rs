//! `diagnose`: classifies sequences of densities as diffuse or concentrating,
//! and checks the class against an expectation when one is given.

use curvext::search::{search, sequence_diagnostics, SearchParams, SequenceClass, SequenceReport};
use curvext::{ArcFunction, CurveSpec, FunctionSpec, MeasureKind};
use serde::{Deserialize, Serialize};

use super::RunOptions;
use crate::config::{build_arc, build_function, default_arc_n};
use crate::error::{config_err, CliResult};
use crate::report::{csv_artifact, Criterion, Relation, Report};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnoseConfig {
    pub curve: CurveSpec,
    #[serde(default = "default_arc_n")]
    pub arc_n: usize,
    #[serde(default)]
    pub measure: MeasureKind,
    /// Rungs of the radius ladder `ℓ/4·2^{-j}`.
    #[serde(default = "default_levels")]
    pub levels: usize,
    pub sequences: Vec<SequenceCase>,
}

/// A sequence given either explicitly or as the accepted iterates of a search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceCase {
    pub name: String,
    #[serde(default)]
    pub functions: Vec<FunctionSpec>,
    #[serde(default)]
    pub search: Option<SearchSource>,
    #[serde(default)]
    pub expect: Option<Expectation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSource {
    pub seed_function: FunctionSpec,
    #[serde(default)]
    pub params: SearchParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case", deny_unknown_fields)]
pub enum Expectation {
    Diffuse,
    Concentrating {
        #[serde(default)]
        at_curvature_minimum: Option<bool>,
        /// Expected concentration point in arclength.
        #[serde(default)]
        point: Option<f64>,
        /// Allowed distance to `point`; one arclength sample step when absent.
        #[serde(default)]
        point_tolerance: Option<f64>,
    },
}

fn default_levels() -> usize {
    4
}

#[derive(Debug, Serialize)]
struct CaseResult {
    name: String,
    length: usize,
    report: SequenceReport,
}

fn sequence(cfg: &DiagnoseConfig, case: &SequenceCase, arc: &std::sync::Arc<curvext::ConvexArc>) -> CliResult<Vec<ArcFunction>> {
    match (&case.search, case.functions.is_empty()) {
        (Some(src), true) => {
            let f0 = build_function(arc, &src.seed_function, cfg.measure)?;
            Ok(search(&f0, &src.params)?.iterates)
        }
        (None, false) => case.functions.iter().map(|spec| build_function(arc, spec, cfg.measure)).collect(),
        _ => config_err(format!("sequence '{}' needs exactly one of functions or search", case.name)),
    }
}

fn check(name: &str, expect: &Expectation, class: &SequenceClass, step: f64) -> Vec<Criterion> {
    match (expect, class) {
        (Expectation::Diffuse, SequenceClass::Diffuse) => vec![Criterion::flag(format!("class_{name}"), true)],
        (Expectation::Concentrating { at_curvature_minimum, point, point_tolerance }, SequenceClass::Concentrating {
            point: found,
            at_curvature_minimum: at_min,
            ..
        }) => {
            let mut out = vec![Criterion::flag(format!("class_{name}"), true)];
            if let Some(want) = at_curvature_minimum {
                out.push(Criterion::flag(format!("curvature_minimum_{name}"), want == at_min));
            }
            if let Some(p) = point {
                out.push(Criterion::new(
                    format!("point_{name}"),
                    (found - p).abs(),
                    Relation::Le,
                    point_tolerance.unwrap_or(step),
                ));
            }
            out
        }
        _ => vec![Criterion::flag(format!("class_{name}"), false)],
    }
}

pub fn run(cfg: &DiagnoseConfig, _opts: &RunOptions) -> CliResult<Report> {
    if cfg.sequences.is_empty() {
        return config_err("sequences must list at least one sequence");
    }
    let arc = build_arc(&cfg.curve, cfg.arc_n)?;
    let step = arc.max_arclength_step();
    let mut criteria = Vec::new();
    let mut cases = Vec::new();
    for case in &cfg.sequences {
        let seq = sequence(cfg, case, &arc)?;
        let report = sequence_diagnostics(&seq, cfg.levels)?;
        if let Some(e) = &case.expect {
            criteria.extend(check(&case.name, e, &report.class, step));
        }
        cases.push(CaseResult { name: case.name.clone(), length: seq.len(), report });
    }
    let mut fractions = Vec::new();
    let mut profile = Vec::new();
    for c in &cases {
        let radii = &c.report.concentration.radii;
        for (i, row) in c.report.concentration.rows.iter().enumerate() {
            for (r, f) in radii.iter().zip(&row.fractions) {
                fractions.push((c.name.as_str(), i, *r, *f));
            }
        }
        for row in &c.report.profile.rows {
            profile.push((c.name.as_str(), row.r, row.tail_height, row.tail_space));
        }
    }
    let artifacts = vec![
        csv_artifact("concentration.csv", &["sequence", "index", "radius", "fraction"], fractions)?,
        csv_artifact("profile.csv", &["sequence", "r", "tail_height", "tail_space"], profile)?,
    ];
    let mut report = Report::new(&cases)?;
    report.criteria = criteria;
    report.artifacts = artifacts;
    Ok(report)
}
