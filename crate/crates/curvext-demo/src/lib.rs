//! Browser bindings for three interactive views: the modulus of the extension
//! of a density, the triple autoconvolution density, and the distance and
//! interaction of a pair of caps.
//!
//! Curves and densities are passed as the same JSON objects the command line
//! tool accepts. Each binding wraps a plain Rust function so the computations
//! are testable natively.

use std::sync::Arc;

use curvext::caps::cap_distance;
use curvext::convolution::{cap_interaction, cap_measure, triple_convolution_density, DepositionControl};
use curvext::extension::extend;
use curvext::{ArcFunction, Cap, ConvexArc, CurveSpec, FunctionSpec, MeasureKind, PlaneGrid};
use wasm_bindgen::prelude::*;

/// Samples per arc; enough for the default plotting windows.
pub const ARC_SAMPLES: usize = 801;

#[derive(Debug, thiserror::Error)]
pub enum DemoError {
    #[error("bad JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown measure '{0}', expected arclength or projection")]
    Measure(String),
    #[error(transparent)]
    Compute(#[from] curvext::Error),
}

fn arc(curve_json: &str) -> Result<Arc<ConvexArc>, DemoError> {
    let spec: CurveSpec = serde_json::from_str(curve_json)?;
    Ok(Arc::new(ConvexArc::build(&spec, ARC_SAMPLES)?))
}

fn density(curve_json: &str, function_json: &str, measure: &str) -> Result<ArcFunction, DemoError> {
    let measure = match measure {
        "arclength" => MeasureKind::Arclength,
        "projection" => MeasureKind::Projection,
        other => return Err(DemoError::Measure(other.into())),
    };
    let spec: FunctionSpec = serde_json::from_str(function_json)?;
    Ok(spec.build(arc(curve_json)?, measure)?)
}

/// `|f̂σ|` on an `n × n` grid of `[−half, half]²`, row-major with `x` slow.
pub fn field_modulus(curve_json: &str, function_json: &str, measure: &str, half: f64, n: usize) -> Result<Vec<f64>, DemoError> {
    let f = density(curve_json, function_json, measure)?;
    let grid = PlaneGrid::new(-half, half, -half, half, n, n)?;
    Ok(extend(&f, &grid)?.field.values.iter().map(|z| z.norm()).collect())
}

/// Triple autoconvolution density on an `n × n` grid covering the sum set.
/// Returns `[x_min, x_max, t_min, t_max]` followed by the row-major values.
pub fn triple_density(curve_json: &str, function_json: &str, measure: &str, n: usize) -> Result<Vec<f64>, DemoError> {
    let f = density(curve_json, function_json, measure)?;
    let d = triple_convolution_density(&f, &DepositionControl { points: 200, cells: n })?;
    let g = d.grid;
    let mut out = vec![g.x_min, g.x_max, g.t_min, g.t_max];
    out.extend_from_slice(&d.values);
    Ok(out)
}

/// `[distance, interaction, normalized interaction]` of two caps on the arc.
pub fn cap_pair(curve_json: &str, c1: f64, r1: f64, c2: f64, r2: f64) -> Result<Vec<f64>, DemoError> {
    let arc = arc(curve_json)?;
    let (a, b) = (Cap::new(c1, r1)?, Cap::new(c2, r2)?);
    let interaction = cap_interaction(&arc, &a, &b)?;
    let normalized = interaction / (cap_measure(&arc, &a) * cap_measure(&arc, &b)).sqrt();
    Ok(vec![cap_distance(&a, &b), interaction, normalized])
}

/// Arclength of the curve described by `curve_json`.
pub fn arc_length(curve_json: &str) -> Result<f64, DemoError> {
    Ok(arc(curve_json)?.length())
}

fn js(e: DemoError) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen(js_name = fieldModulus)]
pub fn field_modulus_js(curve: &str, function: &str, measure: &str, half: f64, n: usize) -> Result<Vec<f64>, JsError> {
    field_modulus(curve, function, measure, half, n).map_err(js)
}

#[wasm_bindgen(js_name = tripleDensity)]
pub fn triple_density_js(curve: &str, function: &str, measure: &str, n: usize) -> Result<Vec<f64>, JsError> {
    triple_density(curve, function, measure, n).map_err(js)
}

#[wasm_bindgen(js_name = capPair)]
pub fn cap_pair_js(curve: &str, c1: f64, r1: f64, c2: f64, r2: f64) -> Result<Vec<f64>, JsError> {
    cap_pair(curve, c1, r1, c2, r2).map_err(js)
}

#[wasm_bindgen(js_name = arcLength)]
pub fn arc_length_js(curve: &str) -> Result<f64, JsError> {
    arc_length(curve).map_err(js)
}
