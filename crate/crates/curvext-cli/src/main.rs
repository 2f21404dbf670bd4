//! Batch experiment driver: one subcommand per experiment, a JSON config in,
//! a deterministic JSON summary and CSV data out.
//!
//! Exit status is 0 when every criterion passes, 2 when a criterion fails,
//! 3 for configuration errors and 4 for numerical failures. Nothing is
//! written unless the whole computation succeeds.

mod commands;
mod config;
mod error;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;

use commands::RunOptions;
use error::{CliError, CliResult, EXIT_CONFIG, EXIT_CRITERION, EXIT_PASS};
use report::Report;

#[derive(Debug, Parser)]
#[command(name = "curvext", version, about = "Fourier extension experiments on planar convex arcs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for summary.json and CSV data.
    #[arg(long)]
    out: PathBuf,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    threads: Option<usize>,
    /// Also write sampled fields as CSV.
    #[arg(long)]
    dump_fields: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Gaussian quotients on parabolas against the closed-form constant, and the two L6 routes.
    VerifyFoschi(Common),
    /// Small-cap limit of the triple autoconvolution sup.
    TripleLimit(Common),
    /// Explicit plane integrals and the quadratic form at the Gaussian.
    Appendix2(Common),
    /// Trial deficit and its second derivative on perturbed parabolas.
    XiScan(Common),
    /// Greedy cap decomposition of a density.
    Decompose(Common),
    /// Cap distance axioms and interaction decay.
    CapMetric(Common),
    /// Ascent search on the Rayleigh quotient.
    Search(Common),
    /// Lower bound for the sharp constant against the parabola constant.
    Compare(Common),
    /// Concentration diagnostics of density sequences.
    Diagnose(Common),
}

fn execute<C: DeserializeOwned + Serialize>(
    name: &str,
    common: &Common,
    run: fn(&C, &RunOptions) -> CliResult<Report>,
) -> CliResult<bool> {
    let cfg: C = config::load(&common.config)?;
    if let Some(n) = common.threads {
        if n == 0 {
            return error::config_err("--threads must be positive");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    let report = run(&cfg, &RunOptions { dump_fields: common.dump_fields })?;
    let summary = report::summary_json(name, &cfg, &report)?;
    report::write_outputs(&common.out, &summary, &report.artifacts)?;
    print_criteria(&report, &common.out);
    Ok(report.passed())
}

fn print_criteria(report: &Report, out: &Path) {
    for c in &report.criteria {
        println!(
            "[{}] {}: {:.6e} {} {:.6e}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.measured,
            c.relation.symbol(),
            c.tolerance
        );
    }
    println!("wrote {}", out.join("summary.json").display());
}

fn dispatch(cmd: &Command) -> CliResult<bool> {
    use commands::*;
    match cmd {
        Command::VerifyFoschi(c) => execute("verify-foschi", c, foschi::run),
        Command::TripleLimit(c) => execute("triple-limit", c, triple::run),
        Command::Appendix2(c) => execute("appendix2", c, appendix::run),
        Command::XiScan(c) => execute("xi-scan", c, xi_scan::run),
        Command::Decompose(c) => execute("decompose", c, decompose::run),
        Command::CapMetric(c) => execute("cap-metric", c, cap_metric::run),
        Command::Search(c) => execute("search", c, search::run),
        Command::Compare(c) => execute("compare", c, compare::run),
        Command::Diagnose(c) => execute("diagnose", c, diagnose::run),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS });
        }
    };
    match dispatch(&cli.command) {
        Ok(true) => ExitCode::from(EXIT_PASS),
        Ok(false) => ExitCode::from(EXIT_CRITERION),
        Err(e) => {
            eprintln!("curvext: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
