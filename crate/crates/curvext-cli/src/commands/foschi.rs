//! `verify-foschi`: Gaussian Rayleigh quotients on parabolas against the
//! closed-form constant, the dilation law between them, and agreement of the
//! direct and convolution routes to the L⁶ norm on a regression family.

use curvext::convolution::DepositionControl;
use curvext::extension::{extend, foschi_constant, l6_norm_convolution, l6_norm_direct, rayleigh, L6Control};
use curvext::variational::PerturbedParabola;
use curvext::{ConvexArc, CurveSpec, FunctionSpec, MeasureKind, PlaneGrid};
use serde::{Deserialize, Serialize};

use super::RunOptions;
use crate::config::{build_arc, build_function, check_positive, FIELD_HEADER};
use crate::error::{config_err, CliResult};
use crate::report::{csv_artifact, Criterion, Relation, Report};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FoschiConfig {
    /// Parabola coefficients `μ` of `z = μy²/2`.
    pub mu: Vec<f64>,
    /// Half-width of the graph interval in units of the Gaussian width `μ^{-1/2}`.
    #[serde(default = "default_halfwidth_sigmas")]
    pub halfwidth_sigmas: f64,
    #[serde(default = "default_foschi_n")]
    pub arc_n: usize,
    #[serde(default)]
    pub l6: L6Control,
    /// Relative tolerance of each quotient against the closed form.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Relative tolerance of the quotient ratios against `(μ_k/μ_0)^{-1/6}`.
    #[serde(default = "default_tolerance")]
    pub scaling_tolerance: f64,
    #[serde(default = "RouteCheck::regression_family")]
    pub routes: RouteCheck,
    /// Plane grid for `--dump-fields`.
    #[serde(default = "default_dump_grid")]
    pub dump_grid: PlaneGrid,
}

/// Direct against convolution-route L⁶ norms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RouteCheck {
    pub inputs: Vec<RouteInput>,
    #[serde(default)]
    pub deposition: DepositionControl,
    #[serde(default = "default_route_tolerance")]
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RouteInput {
    pub name: String,
    pub curve: CurveSpec,
    pub arc_n: usize,
    pub function: FunctionSpec,
    #[serde(default)]
    pub measure: MeasureKind,
}

impl RouteCheck {
    /// A circle bump, the parabola Gaussian and a centred Gaussian on a
    /// perturbed parabola.
    pub fn regression_family() -> Self {
        let perturbed = PerturbedParabola::new(1.0, 0.17, 0.76).expect("valid parameters").spec();
        let mid = ConvexArc::build(&perturbed, 1001).expect("valid arc").length() / 2.0;
        RouteCheck {
            inputs: vec![
                RouteInput {
                    name: "circle bump".into(),
                    curve: CurveSpec::Circle { radius: 1.0, extent: 2.0 },
                    arc_n: 1001,
                    function: FunctionSpec::Bump { center: 1.0, halfwidth: 0.6, amplitude: 1.0 },
                    measure: MeasureKind::Arclength,
                },
                RouteInput {
                    name: "parabola gaussian".into(),
                    curve: CurveSpec::Parabola { mu: 1.0, halfwidth: 3.0 },
                    arc_n: 1201,
                    function: FunctionSpec::GraphGaussian { scale: 1.0, center: 0.0 },
                    measure: MeasureKind::Projection,
                },
                RouteInput {
                    name: "perturbed gaussian".into(),
                    curve: perturbed,
                    arc_n: 1001,
                    function: FunctionSpec::Gaussian { center: mid, width: 0.2, amplitude: 1.0 },
                    measure: MeasureKind::Arclength,
                },
            ],
            deposition: DepositionControl::default(),
            tolerance: default_route_tolerance(),
        }
    }
}

fn default_halfwidth_sigmas() -> f64 {
    6.0
}
fn default_foschi_n() -> usize {
    2401
}
fn default_tolerance() -> f64 {
    1e-3
}
fn default_route_tolerance() -> f64 {
    0.02
}
fn default_dump_grid() -> PlaneGrid {
    PlaneGrid { x_min: -8.0, x_max: 8.0, t_min: -8.0, t_max: 8.0, nx: 81, nt: 81 }
}

impl FoschiConfig {
    fn validate(&self) -> CliResult<()> {
        if self.mu.is_empty() {
            return config_err("mu must list at least one parabola coefficient");
        }
        for &m in &self.mu {
            check_positive("mu", m)?;
        }
        check_positive("halfwidth_sigmas", self.halfwidth_sigmas)?;
        check_positive("tolerance", self.tolerance)?;
        check_positive("scaling_tolerance", self.scaling_tolerance)?;
        check_positive("routes.tolerance", self.routes.tolerance)?;
        self.l6.validate()?;
        self.routes.deposition.validate()?;
        self.dump_grid.validate()?;
        Ok(())
    }
}

#[derive(Debug, Serialize)]
struct QuotientRow {
    mu: f64,
    quotient: f64,
    closed_form: f64,
    rel_error: f64,
    error_estimate: f64,
}

#[derive(Debug, Serialize)]
struct RouteRow {
    name: String,
    direct: f64,
    direct_error_estimate: f64,
    convolution: f64,
    convolution_coarse: f64,
    convolution_fine: f64,
    rel_difference: f64,
}

#[derive(Debug, Serialize)]
struct Results {
    quotients: Vec<QuotientRow>,
    routes: Vec<RouteRow>,
}

pub fn run(cfg: &FoschiConfig, opts: &RunOptions) -> CliResult<Report> {
    cfg.validate()?;
    let mut quotients = Vec::new();
    let mut fields = Vec::new();
    for &mu in &cfg.mu {
        let arc = build_arc(&CurveSpec::Parabola { mu, halfwidth: cfg.halfwidth_sigmas / mu.sqrt() }, cfg.arc_n)?;
        let f = build_function(&arc, &FunctionSpec::GraphGaussian { scale: mu, center: 0.0 }, MeasureKind::Projection)?;
        let r = rayleigh(&f, &cfg.l6)?;
        let closed_form = foschi_constant(mu);
        quotients.push(QuotientRow {
            mu,
            quotient: r.value,
            closed_form,
            rel_error: (r.value / closed_form - 1.0).abs(),
            error_estimate: r.error_estimate,
        });
        if opts.dump_fields {
            fields.push((mu, extend(&f, &cfg.dump_grid)?.field));
        }
    }
    let mut routes = Vec::new();
    for input in &cfg.routes.inputs {
        let arc = build_arc(&input.curve, input.arc_n)?;
        let f = build_function(&arc, &input.function, input.measure)?;
        let d = l6_norm_direct(&f, &cfg.l6)?;
        let c = l6_norm_convolution(&f, &cfg.routes.deposition)?;
        routes.push(RouteRow {
            name: input.name.clone(),
            direct: d.value,
            direct_error_estimate: d.error_estimate,
            convolution: c.value,
            convolution_coarse: c.coarse,
            convolution_fine: c.fine,
            rel_difference: (c.value / d.value - 1.0).abs(),
        });
    }

    let mut criteria: Vec<Criterion> = quotients
        .iter()
        .map(|q| Criterion::new(format!("quotient_mu_{}", q.mu), q.rel_error, Relation::Le, cfg.tolerance))
        .collect();
    let base = &quotients[0];
    for q in &quotients[1..] {
        let ratio = q.quotient / base.quotient;
        let law = (q.mu / base.mu).powf(-1.0 / 6.0);
        criteria.push(Criterion::new(
            format!("scaling_mu_{}_over_{}", q.mu, base.mu),
            (ratio / law - 1.0).abs(),
            Relation::Le,
            cfg.scaling_tolerance,
        ));
    }
    for r in &routes {
        criteria.push(Criterion::new(
            format!("routes_{}", r.name.replace(' ', "_")),
            r.rel_difference,
            Relation::Le,
            cfg.routes.tolerance,
        ));
    }

    let mut artifacts = vec![
        csv_artifact(
            "quotients.csv",
            &["mu", "quotient", "closed_form", "rel_error", "error_estimate"],
            quotients.iter().map(|q| (q.mu, q.quotient, q.closed_form, q.rel_error, q.error_estimate)),
        )?,
        csv_artifact(
            "routes.csv",
            &["name", "direct", "direct_error_estimate", "convolution", "convolution_coarse", "convolution_fine", "rel_difference"],
            routes.iter(),
        )?,
    ];
    for (mu, field) in &fields {
        artifacts.push(csv_artifact(format!("field_mu_{mu}.csv"), &FIELD_HEADER, field.to_rows())?);
    }
    let mut report = Report::new(Results { quotients, routes })?;
    report.criteria = criteria;
    report.artifacts = artifacts;
    Ok(report)
}
