//! `appendix2`: the explicit plane integrals behind `Ξ″(0)` against their
//! closed forms, and the quadratic form on its null directions and on
//! random Gaussian-polynomial inputs.

use curvext::variational::{explicit_integrals, kernel_directions, odd_mode_coefficients, IntegralPair, QuadraticForm};
use curvext::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::RunOptions;
use crate::config::check_positive;
use crate::error::{config_err, CliResult};
use crate::report::{csv_artifact, Criterion, Relation, Report};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AppendixConfig {
    pub lambdas: Vec<f64>,
    /// Quartic coefficient entering the last integral.
    #[serde(default = "default_a")]
    pub a: f64,
    /// Relative tolerance for integrals with a nonzero closed form.
    #[serde(default = "default_rel_tolerance")]
    pub rel_tolerance: f64,
    /// Absolute tolerance for integrals whose closed form vanishes.
    #[serde(default = "default_zero_tolerance")]
    pub zero_tolerance: f64,
    #[serde(default)]
    pub quadratic_form: Option<FormCheck>,
}

/// Null directions and random inputs of `Q`; the seed drives the random inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormCheck {
    pub seed: u64,
    #[serde(default = "default_form_lambda")]
    pub lambda: f64,
    #[serde(default = "default_random_inputs")]
    pub random_inputs: usize,
    /// Largest polynomial degree of a random input.
    #[serde(default = "default_max_degree")]
    pub max_degree: usize,
    /// Bound on `|Q|/scale` over the null directions.
    #[serde(default = "default_kernel_tolerance")]
    pub kernel_tolerance: f64,
    /// Lower bound on `Q/scale` over random inputs, as a positive number.
    #[serde(default = "default_random_tolerance")]
    pub random_tolerance: f64,
}

fn default_a() -> f64 {
    0.125
}
fn default_rel_tolerance() -> f64 {
    1e-5
}
fn default_zero_tolerance() -> f64 {
    1e-8
}
fn default_form_lambda() -> f64 {
    1.0
}
fn default_random_inputs() -> usize {
    20
}
fn default_max_degree() -> usize {
    6
}
fn default_kernel_tolerance() -> f64 {
    1e-4
}
fn default_random_tolerance() -> f64 {
    1e-6
}

#[derive(Debug, Serialize)]
struct IntegralRow {
    lambda: f64,
    name: &'static str,
    numeric: f64,
    closed_form: f64,
    abs_error: f64,
    rel_error: f64,
}

#[derive(Debug, Serialize)]
struct FormRow {
    input: String,
    value: f64,
    scale: f64,
    ratio: f64,
}

#[derive(Debug, Serialize)]
struct Results {
    integrals: Vec<IntegralRow>,
    form: Vec<FormRow>,
}

fn rows(lambda: f64, pairs: [(&'static str, IntegralPair); 7]) -> impl Iterator<Item = IntegralRow> {
    pairs.into_iter().map(move |(name, p)| IntegralRow {
        lambda,
        name,
        numeric: p.numeric,
        closed_form: p.closed_form,
        abs_error: p.abs_error,
        rel_error: p.rel_error,
    })
}

pub fn run(cfg: &AppendixConfig, _opts: &RunOptions) -> CliResult<Report> {
    if cfg.lambdas.is_empty() {
        return config_err("lambdas must list at least one curvature");
    }
    check_positive("rel_tolerance", cfg.rel_tolerance)?;
    check_positive("zero_tolerance", cfg.zero_tolerance)?;
    let mut criteria = Vec::new();
    let mut integrals = Vec::new();
    for &lambda in &cfg.lambdas {
        let e = explicit_integrals(lambda, cfg.a)?;
        criteria.push(Criterion::new(format!("integrals_lambda_{lambda}_rel"), e.max_rel_error(), Relation::Le, cfg.rel_tolerance));
        criteria.push(Criterion::new(
            format!("integrals_lambda_{lambda}_zero"),
            e.max_zero_error(),
            Relation::Le,
            cfg.zero_tolerance,
        ));
        integrals.extend(rows(
            lambda,
            [
                ("first_i", e.first.i),
                ("first_ii", e.first.ii),
                ("first_total", e.first.total),
                ("quartic_i", e.quartic.i),
                ("quartic_ii", e.quartic.ii),
                ("quartic_iii", e.quartic.iii),
                ("quartic_total", e.quartic.total),
            ],
        ));
    }

    let mut form = Vec::new();
    if let Some(fc) = &cfg.quadratic_form {
        check_positive("quadratic_form.kernel_tolerance", fc.kernel_tolerance)?;
        check_positive("quadratic_form.random_tolerance", fc.random_tolerance)?;
        let q = QuadraticForm::new(fc.lambda)?;
        let mut null: Vec<(String, Vec<Complex64>)> =
            kernel_directions().into_iter().map(|(n, c)| (n.to_string(), c)).collect();
        null.push(("odd_mode".into(), odd_mode_coefficients(fc.lambda)));
        let mut worst_null = 0.0f64;
        for (name, c) in null {
            let v = q.evaluate(&c);
            worst_null = worst_null.max(v.value.abs() / v.scale);
            form.push(FormRow { input: name, value: v.value, scale: v.scale, ratio: v.value / v.scale });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(fc.seed);
        let mut worst_random = f64::INFINITY;
        for k in 0..fc.random_inputs {
            let deg = rng.gen_range(0..=fc.max_degree);
            let c: Vec<Complex64> =
                (0..=deg).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let v = q.evaluate(&c);
            worst_random = worst_random.min(v.value / v.scale);
            form.push(FormRow { input: format!("random_{k}"), value: v.value, scale: v.scale, ratio: v.value / v.scale });
        }
        criteria.push(Criterion::new("form_null_directions", worst_null, Relation::Le, fc.kernel_tolerance));
        if fc.random_inputs > 0 {
            criteria.push(Criterion::new("form_random_inputs", worst_random, Relation::Ge, -fc.random_tolerance));
        }
    }

    let mut artifacts = vec![csv_artifact(
        "integrals.csv",
        &["lambda", "name", "numeric", "closed_form", "abs_error", "rel_error"],
        integrals.iter(),
    )?];
    if !form.is_empty() {
        artifacts.push(csv_artifact("quadratic_form.csv", &["input", "value", "scale", "ratio"], form.iter())?);
    }
    let mut report = Report::new(Results { integrals, form })?;
    report.criteria = criteria;
    report.artifacts = artifacts;
    Ok(report)
}
