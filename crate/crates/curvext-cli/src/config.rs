//! Loading of JSON experiment configs and helpers shared by the commands.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use curvext::{ArcFunction, ConvexArc, CurveSpec, FunctionSpec, MeasureKind};
use serde::de::DeserializeOwned;

use crate::error::{config_err, CliError, CliResult};

/// Reads and parses a config; an empty file or a schema violation is a
/// config error that quotes the line and column reported by the parser.
pub fn load<C: DeserializeOwned>(path: &Path) -> CliResult<C> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    if text.trim().is_empty() {
        return config_err(format!("{}: config file is empty", path.display()));
    }
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn build_arc(curve: &CurveSpec, arc_n: usize) -> CliResult<Arc<ConvexArc>> {
    Ok(Arc::new(ConvexArc::build(curve, arc_n)?))
}

pub fn build_function(arc: &Arc<ConvexArc>, spec: &FunctionSpec, measure: MeasureKind) -> CliResult<ArcFunction> {
    Ok(spec.build(arc.clone(), measure)?)
}

/// Rejects non-finite or non-positive tolerances.
pub fn check_positive(name: &str, v: f64) -> CliResult<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        config_err(format!("{name} must be positive and finite, got {v}"))
    }
}

pub fn default_arc_n() -> usize {
    2001
}

pub const FUNCTION_HEADER: [&str; 3] = ["s", "re", "im"];
pub const FIELD_HEADER: [&str; 4] = ["x", "t", "re", "im"];
