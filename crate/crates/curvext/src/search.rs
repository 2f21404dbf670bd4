//! Damped fixed-point ascent on the Rayleigh quotient `‖f̂σ‖₆/‖f‖₂` over
//! nonnegative densities, and concentration diagnostics for its iterates.

use serde::{Deserialize, Serialize};

use crate::arc::Cap;
use crate::caps::{concentration_metric, upper_profile, ConcentrationReport, UpperProfile};
use crate::error::{invalid, Result};
use crate::extension::{l6_with_pullback, L6Control, L6Result};
use crate::field::ArcFunction;
use num_complex::Complex64;

/// Iteration controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SearchParams {
    pub max_iters: usize,
    /// Changes of the quotient below this count towards a stall.
    pub stall_tol: f64,
    /// Consecutive small changes that end the search.
    pub stall_window: usize,
    pub initial_damping: f64,
    pub min_damping: f64,
    pub l6: L6Control,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            max_iters: 100,
            stall_tol: 1e-9,
            stall_window: 5,
            initial_damping: 1.0,
            min_damping: 1.0 / 64.0,
            l6: L6Control::default(),
        }
    }
}

impl SearchParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.initial_damping > 0.0 && self.initial_damping <= 1.0) {
            return invalid("initial damping must lie in (0, 1]");
        }
        if !(self.min_damping > 0.0 && self.min_damping <= self.initial_damping) {
            return invalid("minimal damping must lie in (0, initial damping]");
        }
        if !(self.stall_tol >= 0.0) || self.stall_window == 0 {
            return invalid("stall tolerance must be nonnegative and the window positive");
        }
        self.l6.validate()
    }
}

/// Quotient and pullback of a normalized iterate.
struct Evaluated {
    f: ArcFunction,
    l6: L6Result,
    pullback: Vec<Complex64>,
}

impl Evaluated {
    fn rayleigh(&self) -> f64 {
        self.l6.value
    }
}

fn check_nonnegative(f: &ArcFunction) -> Result<()> {
    if !f.is_real() || !f.is_nonnegative() {
        return invalid("the ascent works on real nonnegative densities");
    }
    if f.is_zero() {
        return invalid("the ascent needs a nonzero density");
    }
    Ok(())
}

fn evaluate(f: ArcFunction, ctrl: &L6Control) -> Result<Evaluated> {
    let f = f.normalized()?;
    let (l6, pullback) = l6_with_pullback(&f, ctrl)?;
    Ok(Evaluated { f, l6, pullback })
}

/// `(1−θ)f + θ g⁺/‖g⁺‖₂`, renormalized, with `g⁺` the clamped pullback.
fn blend(ev: &Evaluated, theta: f64) -> Result<ArcFunction> {
    let g: Vec<f64> = ev.pullback.iter().map(|v| v.re.max(0.0)).collect();
    let g = ev.f.with_real_values(g)?;
    let gn = g.l2_sigma_norm();
    if !(gn > 0.0) {
        return crate::error::numerical("pullback vanishes after the nonnegative projection");
    }
    let f = ev.f.real_values();
    let mixed: Vec<f64> =
        f.iter().zip(g.real_values()).map(|(a, b)| (1.0 - theta) * a + theta * b / gn).collect();
    ev.f.with_real_values(mixed)?.normalized()
}

/// One damped fixed-point step of the Euler–Lagrange map; returns a density
/// of unit `L²(σ)` norm.
pub fn ascent_step(f: &ArcFunction, theta: f64, ctrl: &L6Control) -> Result<ArcFunction> {
    if !(theta > 0.0 && theta <= 1.0) {
        return invalid("damping must lie in (0, 1]");
    }
    check_nonnegative(f)?;
    blend(&evaluate(f.clone(), ctrl)?, theta)
}

/// One row of the search trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRow {
    pub iter: usize,
    pub rayleigh: f64,
    pub l6_error_estimate: f64,
    pub damping: f64,
    /// Whether the candidate replaced the current iterate.
    pub accepted: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Stalled,
    MaxIterations,
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub best: ArcFunction,
    /// Rayleigh quotient of `best`.
    pub c_lower: f64,
    /// Tail-model uncertainty of `c_lower`.
    pub c_lower_error: f64,
    /// Row 0 is the normalized seed.
    pub trace: Vec<TraceRow>,
    /// Accepted iterates, starting with the normalized seed.
    pub iterates: Vec<ArcFunction>,
    pub stop: StopReason,
}

/// Iterates [`ascent_step`], halving the damping whenever the quotient drops
/// (a drop is accepted once the damping reaches its floor), and stops after
/// `stall_window` consecutive accepted changes below `stall_tol`.
pub fn search(f0: &ArcFunction, params: &SearchParams) -> Result<SearchResult> {
    params.validate()?;
    check_nonnegative(f0)?;
    let mut cur = evaluate(f0.clone(), &params.l6)?;
    let mut best = (cur.f.clone(), cur.rayleigh(), cur.l6.error_estimate);
    let mut trace = vec![TraceRow {
        iter: 0,
        rayleigh: cur.rayleigh(),
        l6_error_estimate: cur.l6.error_estimate,
        damping: params.initial_damping,
        accepted: true,
    }];
    let mut iterates = vec![cur.f.clone()];
    let mut theta = params.initial_damping;
    let mut stall = 0;
    let mut stop = StopReason::MaxIterations;
    for iter in 1..=params.max_iters {
        let cand = evaluate(blend(&cur, theta)?, &params.l6)?;
        let delta = cand.rayleigh() - cur.rayleigh();
        let at_floor = theta <= params.min_damping;
        let accepted = delta >= 0.0 || at_floor;
        trace.push(TraceRow {
            iter,
            rayleigh: cand.rayleigh(),
            l6_error_estimate: cand.l6.error_estimate,
            damping: theta,
            accepted,
        });
        if !accepted {
            theta = (0.5 * theta).max(params.min_damping);
            stall = 0;
            continue;
        }
        if cand.rayleigh() > best.1 {
            best = (cand.f.clone(), cand.rayleigh(), cand.l6.error_estimate);
        }
        iterates.push(cand.f.clone());
        cur = cand;
        if delta.abs() < params.stall_tol {
            stall += 1;
            if stall >= params.stall_window {
                stop = StopReason::Stalled;
                break;
            }
        } else {
            stall = 0;
        }
    }
    Ok(SearchResult { best: best.0, c_lower: best.1, c_lower_error: best.2, trace, iterates, stop })
}

/// Qualitative behaviour of a sequence of iterates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SequenceClass {
    Diffuse,
    Concentrating {
        /// Arclength of the concentration point.
        point: f64,
        kappa: f64,
        /// Whether the curvature there equals the minimal curvature.
        at_curvature_minimum: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SequenceReport {
    pub class: SequenceClass,
    pub concentration: ConcentrationReport,
    /// Tails of the last iterate around its best smallest-ladder cap.
    pub profile: UpperProfile,
}

/// Classifies a sequence of densities as diffuse or concentrating at a point.
pub fn sequence_diagnostics(iterates: &[ArcFunction], levels: usize) -> Result<SequenceReport> {
    if iterates.len() < 3 {
        return invalid("sequence diagnostics need at least three iterates");
    }
    let concentration = concentration_metric(iterates, levels)?;
    let last = iterates.last().expect("non-empty");
    let radius = *concentration.radii.last().expect("non-empty ladder");
    let cap = Cap::new(concentration.center, radius)?;
    let r_values: Vec<f64> = (0..8).map(|k| 2f64.powi(k)).collect();
    let profile = upper_profile(last, &cap, &r_values)?;
    let class = if concentration.concentrated {
        SequenceClass::Concentrating {
            point: concentration.center,
            kappa: concentration.kappa_at_center,
            at_curvature_minimum: concentration.at_curvature_minimum,
        }
    } else {
        SequenceClass::Diffuse
    };
    Ok(SequenceReport { class, concentration, profile })
}
