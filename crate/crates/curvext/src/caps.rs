//! Cap metric, the cap functional, the split of a density into a capped piece
//! and a remainder, the greedy cap decomposition, upper-normalization tails and
//! the concentration diagnostic.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arc::{Cap, ConvexArc};
use crate::convolution::DepositionControl;
use crate::error::{invalid, Result};
use crate::extension::l6_norm_convolution;
use crate::field::ArcFunction;
use crate::par::map_indexed;
use crate::quadrature::{cumulative_simpson, hermite};
use std::f64::consts::PI;

/// Upper-half-plane distance between caps viewed as points `(center, radius)`.
///
/// Evaluated as `2·asinh(√(((s−s′)² + (r−r′)²)/(4rr′)))`, which equals
/// `arccosh(1 + ((s−s′)² + (r−r′)²)/(2rr′))` without cancellation near zero.
pub fn cap_distance(a: &Cap, b: &Cap) -> f64 {
    let num = (a.center - b.center).powi(2) + (a.radius - b.radius).powi(2);
    2.0 * (num / (4.0 * a.radius * b.radius)).sqrt().asinh()
}

/// The cap lattice of an arc: every sample as a centre, radii `ℓ·2^{−k}` for
/// `k = 0..=⌊log₂(ℓ/4h)⌋` with `h` the largest arclength step.
pub fn lattice_radii(arc: &ConvexArc) -> Vec<f64> {
    let len = arc.length();
    let kmax = (len / (4.0 * arc.max_arclength_step())).log2().floor().max(0.0) as i32;
    (0..=kmax).map(|k| len * 2f64.powi(-k)).collect()
}

/// Prefix sums over samples, used to integrate over snapped caps in O(1).
struct Prefix {
    mass: Vec<f64>,
    measure: Vec<f64>,
}

impl Prefix {
    fn new(f: &ArcFunction, p: f64) -> Self {
        let w = f.weights();
        let mut mass = vec![0.0; f.len() + 1];
        let mut measure = vec![0.0; f.len() + 1];
        for (i, v) in f.values().iter().enumerate() {
            mass[i + 1] = mass[i] + w[i] * v.norm().powf(p);
            measure[i + 1] = measure[i] + w[i];
        }
        Prefix { mass, measure }
    }

    fn range(&self, lo: usize, hi: usize) -> (f64, f64) {
        (self.mass[hi + 1] - self.mass[lo], self.measure[hi + 1] - self.measure[lo])
    }
}

/// A maximizing cap of the functional `|C|^{−1/4} ∫_C |f|^{3/2} dσ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapFunctional {
    pub cap: Cap,
    pub value: f64,
    /// `∫_C |f|^{3/2} dσ` on the maximizing cap.
    pub mass: f64,
    /// `|C|` of the maximizing cap.
    pub measure: f64,
}

/// Value of the cap functional on a single cap.
pub fn cap_functional(f: &ArcFunction, cap: &Cap) -> f64 {
    let prefix = Prefix::new(f, 1.5);
    match f.arc().cap_indices(cap) {
        Some((lo, hi)) => {
            let (m, c) = prefix.range(lo, hi);
            if c > 0.0 {
                c.powf(-0.25) * m
            } else {
                0.0
            }
        }
        None => 0.0,
    }
}

/// Maximizes the cap functional over the cap lattice.
///
/// Ties are broken towards the larger radius and then the smaller centre index.
pub fn cap_functional_max(f: &ArcFunction) -> Result<CapFunctional> {
    if f.is_zero() {
        return invalid("the cap functional of the zero function has no maximizer");
    }
    let arc = f.arc();
    let prefix = Prefix::new(f, 1.5);
    let radii = lattice_radii(arc);
    let n = arc.n();
    let best_per_radius = map_indexed(radii.len(), |k| {
        let r = radii[k];
        let mut best = (f64::NEG_INFINITY, 0usize, 0.0, 0.0);
        for i in 0..n {
            let cap = Cap { center: arc.s()[i], radius: r };
            if let Some((lo, hi)) = arc.cap_indices(&cap) {
                let (m, c) = prefix.range(lo, hi);
                if c > 0.0 {
                    let v = c.powf(-0.25) * m;
                    if v > best.0 {
                        best = (v, i, m, c);
                    }
                }
            }
        }
        best
    });
    let mut out: Option<CapFunctional> = None;
    for (k, (v, i, m, c)) in best_per_radius.into_iter().enumerate() {
        if out.is_none_or(|o| v > o.value) {
            out = Some(CapFunctional { cap: Cap { center: arc.s()[i], radius: radii[k] }, value: v, mass: m, measure: c });
        }
    }
    Ok(out.expect("lattice is never empty"))
}

/// Outcome of splitting `f = g + h` on its maximizing cap.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitResult {
    /// `f` restricted to `E = {s ∈ C : f(s) ≤ R}`.
    pub g: ArcFunction,
    /// `f − g`.
    pub h: ArcFunction,
    pub cap: Cap,
    /// Height threshold `R`.
    pub threshold: f64,
    /// `m = ∫_C f^{3/2} dσ`.
    pub cap_mass: f64,
    /// `|C|`.
    pub cap_measure: f64,
}

/// Splits a nonnegative `f` into a bounded piece on its best cap and a remainder.
///
/// The threshold solves `R^{−1/2} = m/(2‖f‖₂²)` with `m = ∫_C f^{3/2}`, which
/// guarantees `∫_C g^{3/2} ≥ m/2`.
pub fn split(f: &ArcFunction) -> Result<SplitResult> {
    if !f.is_nonnegative() {
        return invalid("split requires a nonnegative density");
    }
    let best = cap_functional_max(f)?;
    let norm2 = f.l2_sigma_norm().powi(2);
    let threshold = (2.0 * norm2 / best.mass).powi(2);
    let (lo, hi) = f.arc().cap_indices(&best.cap).expect("maximizing cap meets the arc");
    let zero = Complex64::new(0.0, 0.0);
    let mut g = vec![zero; f.len()];
    let mut h = f.values().to_vec();
    for i in lo..=hi {
        let v = f.values()[i];
        if v.re <= threshold {
            g[i] = v;
            h[i] = zero;
        }
    }
    Ok(SplitResult {
        g: f.with_values(g)?,
        h: f.with_values(h)?,
        cap: best.cap,
        threshold,
        cap_mass: best.mass,
        cap_measure: best.measure,
    })
}

/// Parameters of the greedy decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecomposeParams {
    /// A-priori stand-in for the sharp extension constant.
    pub c_estimate: f64,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
    /// Stop once `‖residual‖₂ ≤ residual_tol·‖f‖₂`.
    #[serde(default = "default_residual_tol")]
    pub residual_tol: f64,
    #[serde(default = "default_deposition")]
    pub deposition: DepositionControl,
}

fn default_max_steps() -> usize {
    20
}
fn default_residual_tol() -> f64 {
    1e-3
}
fn default_deposition() -> DepositionControl {
    DepositionControl { points: 200, cells: 64 }
}

/// One extracted piece.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionStep {
    pub piece: ArcFunction,
    pub cap: Cap,
    pub eps_star: f64,
    /// `‖G_nσ ∗ G_nσ ∗ G_nσ‖₂` before the split.
    pub triple_norm: f64,
    /// `ε³ Ĉ³ ‖f‖₂³ / 2π`.
    pub lower: f64,
    /// `8 ε³ Ĉ³ ‖f‖₂³ / 2π`.
    pub upper: f64,
    pub l2_mass: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub steps: Vec<DecompositionStep>,
    pub residual: ArcFunction,
}

impl Decomposition {
    /// `Σ f_n + residual`.
    pub fn reconstruct(&self) -> Result<ArcFunction> {
        let mut acc = self.residual.clone();
        for s in &self.steps {
            acc = acc.add(&s.piece)?;
        }
        Ok(acc)
    }

    /// Whether `lower ≤ triple_norm ≤ upper` holds at every step.
    pub fn sandwich_holds(&self) -> bool {
        self.steps.iter().all(|s| s.lower <= s.triple_norm && s.triple_norm <= s.upper)
    }
}

/// Greedy decomposition: at each step halve `ε` until the triple-convolution
/// norm of the remainder reaches `ε³Ĉ³‖f‖₂³/2π`, then split the remainder on
/// its best cap.
pub fn decompose(f: &ArcFunction, params: &DecomposeParams) -> Result<Decomposition> {
    if !(params.c_estimate > 0.0 && params.c_estimate.is_finite()) {
        return invalid("the constant estimate must be positive");
    }
    if !f.is_nonnegative() {
        return invalid("decomposition requires a nonnegative density");
    }
    let norm = f.l2_sigma_norm();
    let scale = params.c_estimate.powi(3) * norm.powi(3) / (2.0 * PI);
    let mut eps: f64 = 0.5;
    let mut remainder = f.clone();
    let mut steps = Vec::new();
    while steps.len() < params.max_steps {
        if remainder.is_zero() {
            break;
        }
        let l6 = l6_norm_convolution(&remainder, &params.deposition)?;
        let triple = l6.value.powi(3) / (2.0 * PI);
        if triple <= 0.0 {
            break;
        }
        while triple < eps.powi(3) * scale {
            eps *= 0.5;
        }
        let split = split(&remainder)?;
        steps.push(DecompositionStep {
            l2_mass: split.g.l2_sigma_norm(),
            piece: split.g,
            cap: split.cap,
            eps_star: eps,
            triple_norm: triple,
            lower: eps.powi(3) * scale,
            upper: 8.0 * eps.powi(3) * scale,
        });
        remainder = split.h;
        if remainder.l2_sigma_norm() <= params.residual_tol * norm {
            break;
        }
    }
    Ok(Decomposition { steps, residual: remainder })
}

/// Tails of `f` relative to a cap `C(s₀, r₀)` at one scale `R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileRow {
    pub r: f64,
    /// `∫_{f ≥ R r₀^{−1/2}} f² dσ`.
    pub tail_height: f64,
    /// `∫_{|s − s₀| ≥ R r₀} f² dσ`.
    pub tail_space: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UpperProfile {
    pub cap: Cap,
    pub rows: Vec<ProfileRow>,
}

/// Cumulative `∫_0^s |f|² dσ`, evaluated at any arclength by Hermite interpolation.
struct CumulativeMass<'a> {
    arc: &'a ConvexArc,
    cumulative: Vec<f64>,
    density: Vec<f64>,
}

impl<'a> CumulativeMass<'a> {
    fn new(f: &'a ArcFunction) -> Self {
        let arc = f.arc();
        let factor: Vec<f64> = match f.measure() {
            crate::field::MeasureKind::Arclength => arc.speed().to_vec(),
            crate::field::MeasureKind::Projection => vec![1.0; arc.n()],
        };
        let density: Vec<f64> = f.values().iter().zip(&factor).map(|(v, w)| v.norm_sqr() * w).collect();
        let cumulative = cumulative_simpson(&density, arc.param_step());
        CumulativeMass { arc, cumulative, density }
    }

    fn at(&self, s: f64) -> f64 {
        let (k, p) = self.arc.param_at(s);
        let pr = self.arc.param();
        hermite(pr[k], pr[k + 1], self.cumulative[k], self.cumulative[k + 1], self.density[k], self.density[k + 1], p)
    }

    fn total(&self) -> f64 {
        self.cumulative[self.cumulative.len() - 1]
    }
}

/// Height and spatial tails of `f` relative to `cap` for each scale in `r_values`.
pub fn upper_profile(f: &ArcFunction, cap: &Cap, r_values: &[f64]) -> Result<UpperProfile> {
    let cap = Cap::new(cap.center, cap.radius)?;
    if r_values.iter().any(|r| !(*r > 0.0)) {
        return invalid("profile scales must be positive");
    }
    let arc = f.arc();
    let cm = CumulativeMass::new(f);
    let w = f.weights();
    let mods: Vec<f64> = f.values().iter().map(|v| v.norm()).collect();
    let rows = r_values
        .iter()
        .map(|&r| {
            let level = r / cap.radius.sqrt();
            let tail_height = mods.iter().zip(&w).filter(|(m, _)| **m >= level).map(|(m, w)| m * m * w).sum();
            let (a, b) = (cap.center - r * cap.radius, cap.center + r * cap.radius);
            let inner = if b <= 0.0 || a >= arc.length() {
                0.0
            } else {
                cm.at(b.min(arc.length())) - cm.at(a.max(0.0))
            };
            ProfileRow { r, tail_height, tail_space: (cm.total() - inner).max(0.0) }
        })
        .collect();
    Ok(UpperProfile { cap, rows })
}

/// Per-function small-cap mass fractions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationRow {
    /// Best `∫_C |f|²/‖f‖₂²` per ladder radius.
    pub fractions: Vec<f64>,
    /// Centre of the best cap at the smallest radius.
    pub center: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationReport {
    pub radii: Vec<f64>,
    pub rows: Vec<ConcentrationRow>,
    pub concentrated: bool,
    pub center: f64,
    pub kappa_at_center: f64,
    pub lambda: f64,
    /// Whether the curvature at the centre equals the minimal curvature within grid tolerance.
    pub at_curvature_minimum: bool,
}

/// Fraction threshold at the smallest radius that declares concentration.
pub const CONCENTRATION_FRACTION: f64 = 0.9;

/// Radius ladder `ℓ/4 · 2^{−j}`, `j = 0..levels`.
pub fn concentration_ladder(arc: &ConvexArc, levels: usize) -> Vec<f64> {
    (0..levels).map(|j| arc.length() / 4.0 * 2f64.powi(-(j as i32))).collect()
}

/// Small-cap mass fractions along a sequence of functions on a common arc.
pub fn concentration_metric(fs: &[ArcFunction], levels: usize) -> Result<ConcentrationReport> {
    if fs.len() < 2 {
        return invalid("concentration diagnostics need at least two functions");
    }
    if levels == 0 {
        return invalid("at least one ladder radius is required");
    }
    for f in &fs[1..] {
        fs[0].check_compatible(f)?;
    }
    let arc = fs[0].arc();
    let radii = concentration_ladder(arc, levels);
    let mut rows = Vec::new();
    for f in fs {
        let prefix = Prefix::new(f, 2.0);
        let total = prefix.mass[f.len()];
        if !(total > 0.0) {
            return invalid("concentration diagnostics need nonzero functions");
        }
        let mut fractions = Vec::new();
        let mut center = 0.0;
        for &r in &radii {
            let masses: Vec<f64> = arc
                .s()
                .iter()
                .map(|&s| match arc.cap_indices(&Cap { center: s, radius: r }) {
                    Some((lo, hi)) => prefix.range(lo, hi).0,
                    None => f64::NEG_INFINITY,
                })
                .collect();
            let best = masses.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            // Caps that all contain the whole mass tie; report the middle of the run.
            let tie = best - 1e-12 * best.abs();
            let first = masses.iter().position(|m| *m >= tie).expect("some cap meets the arc");
            let run = masses[first..].iter().take_while(|m| **m >= tie).count();
            fractions.push(best / total);
            center = arc.s()[first + (run - 1) / 2];
        }
        rows.push(ConcentrationRow { fractions, center });
    }
    let last = rows.last().expect("at least two rows");
    let concentrated = *last.fractions.last().expect("non-empty ladder") > CONCENTRATION_FRACTION;
    let center = last.center;
    let kappa_at_center = arc.kappa_at(center);
    let lambda = arc.lambda_min();
    let tol = arc.kappa().windows(2).map(|w| (w[1] - w[0]).abs()).fold(1e-9 * lambda, f64::max) * 2.0;
    Ok(ConcentrationReport {
        radii,
        rows,
        concentrated,
        center,
        kappa_at_center,
        lambda,
        at_curvature_minimum: (kappa_at_center - lambda).abs() <= tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arc::CurveSpec;
    use crate::field::{FunctionSpec, MeasureKind};
    use std::sync::Arc;

    #[test]
    fn distance_closed_forms() {
        let d = cap_distance(&Cap { center: 0.0, radius: 1.0 }, &Cap { center: 0.0, radius: 2.0 });
        assert!((d - 2f64.ln()).abs() < 1e-15);
        let d = cap_distance(&Cap { center: 0.0, radius: 1.0 }, &Cap { center: 3.0, radius: 1.0 });
        assert!((d - 5.5f64.acosh()).abs() < 1e-14);
        let c = Cap { center: 0.3, radius: 0.2 };
        assert_eq!(cap_distance(&c, &c), 0.0);
    }

    #[test]
    fn functional_prefers_largest_cap_for_constants() {
        let arc = Arc::new(ConvexArc::build(&CurveSpec::Circle { radius: 1.0, extent: 1.0 }, 257).unwrap());
        let f = ArcFunction::from_real(arc.clone(), vec![2.0; arc.n()], MeasureKind::Arclength).unwrap();
        let best = cap_functional_max(&f).unwrap();
        assert!((best.measure - arc.length()).abs() < 1e-12);
        let scaled = cap_functional_max(&f.scale(3.0)).unwrap();
        assert!((scaled.value / best.value - 3f64.powf(1.5)).abs() < 1e-12);
        assert_eq!(scaled.cap, best.cap);
    }

    #[test]
    fn split_reconstructs() {
        let arc = Arc::new(ConvexArc::build(&CurveSpec::Circle { radius: 1.0, extent: 1.0 }, 513).unwrap());
        let f = FunctionSpec::Gaussian { center: 0.4, width: 0.05, amplitude: 1.0 }
            .build(arc, MeasureKind::Arclength)
            .unwrap();
        let sp = split(&f).unwrap();
        assert_eq!(sp.g.add(&sp.h).unwrap(), f);
        for (a, b) in sp.g.values().iter().zip(sp.h.values()) {
            assert!(a.re == 0.0 || b.re == 0.0);
        }
        assert!(sp.g.lp_integral(1.5) >= 0.5 * sp.cap_mass);
    }
}
