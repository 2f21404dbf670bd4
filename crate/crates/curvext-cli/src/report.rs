//! Pass/fail criteria, CSV artifacts and the JSON summary.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{CliError, CliResult};

/// How a measured value is compared with its tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Le,
    Lt,
    Ge,
    Gt,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Lt => "<",
            Relation::Ge => ">=",
            Relation::Gt => ">",
        }
    }
}

/// One acceptance check with its measured value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Criterion {
    pub name: String,
    pub measured: f64,
    pub relation: Relation,
    pub tolerance: f64,
    pub passed: bool,
}

impl Criterion {
    /// A non-finite measurement never passes.
    pub fn new(name: impl Into<String>, measured: f64, relation: Relation, tolerance: f64) -> Self {
        let passed = measured.is_finite()
            && match relation {
                Relation::Le => measured <= tolerance,
                Relation::Lt => measured < tolerance,
                Relation::Ge => measured >= tolerance,
                Relation::Gt => measured > tolerance,
            };
        Criterion { name: name.into(), measured, relation, tolerance, passed }
    }

    /// A yes/no check recorded as a count of violations that must be zero.
    pub fn flag(name: impl Into<String>, holds: bool) -> Self {
        Criterion::new(name, if holds { 0.0 } else { 1.0 }, Relation::Le, 0.0)
    }
}

/// A named file produced by a command.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

/// Everything a command computed, held in memory until it is written.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub results: serde_json::Value,
    pub criteria: Vec<Criterion>,
    pub artifacts: Vec<Artifact>,
}

impl Report {
    pub fn new(results: impl Serialize) -> CliResult<Self> {
        let results = serde_json::to_value(results).map_err(|e| CliError::Output(e.to_string()))?;
        Ok(Report { results, criteria: Vec::new(), artifacts: Vec::new() })
    }

    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }
}

#[derive(Serialize)]
struct Summary<'a, C: Serialize> {
    command: &'a str,
    version: &'a str,
    config: &'a C,
    passed: bool,
    criteria: &'a [Criterion],
    results: &'a serde_json::Value,
    artifacts: Vec<&'a str>,
}

/// Pretty JSON summary embedding the resolved config; contains nothing
/// that varies between identical runs.
pub fn summary_json<C: Serialize>(command: &str, config: &C, report: &Report) -> CliResult<Vec<u8>> {
    let summary = Summary {
        command,
        version: env!("CARGO_PKG_VERSION"),
        config,
        passed: report.passed(),
        criteria: &report.criteria,
        results: &report.results,
        artifacts: report.artifacts.iter().map(|a| a.name.as_str()).collect(),
    };
    let mut bytes = serde_json::to_vec_pretty(&summary).map_err(|e| CliError::Output(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// A CSV file with the given header and one record per row.
pub fn csv_artifact<R: Serialize>(
    name: impl Into<String>,
    header: &[&str],
    rows: impl IntoIterator<Item = R>,
) -> CliResult<Artifact> {
    let name = name.into();
    let fail = |e: csv::Error| CliError::Output(format!("{name}: {e}"));
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(header).map_err(fail)?;
    for row in rows {
        w.serialize(row).map_err(fail)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Output(format!("{name}: {e}")))?;
    Ok(Artifact { name, bytes })
}

/// Writes the summary and all artifacts into `out`, creating it if needed.
pub fn write_outputs(out: &Path, summary: &[u8], artifacts: &[Artifact]) -> CliResult<()> {
    let fail = |p: &Path, e: std::io::Error| CliError::Output(format!("{}: {e}", p.display()));
    fs::create_dir_all(out).map_err(|e| fail(out, e))?;
    for a in artifacts {
        let p = out.join(&a.name);
        fs::write(&p, &a.bytes).map_err(|e| fail(&p, e))?;
    }
    let p = out.join("summary.json");
    fs::write(&p, summary).map_err(|e| fail(&p, e))
}
