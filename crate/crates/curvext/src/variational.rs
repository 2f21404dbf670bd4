//! Second variation of the extension inequality at Gaussians: the quadratic
//! form `Q`, the trial family `f_ε` on a perturbed parabola, the deficit
//! `Ξ(ε)`, its closed-form second derivative, the two explicit plane
//! integrals behind it, and the strict comparison `C[Γ] > C_F[λ]`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

use crate::arc::{check_k2_condition, ConvexArc, CurveSpec, GraphProfile, PsiTerm};
use crate::error::{invalid, Result};
use crate::extension::{
    foschi_constant, foschi_constant_sixth, gauss_poly_extension, gaussian_closed_form, l6_norm_direct,
    odd_mode_constant, rayleigh, GaussianKind, L6Control,
};
use crate::field::{ArcFunction, MeasureKind};
use crate::par::map_indexed;
use crate::quadrature::{extrapolate_quadratic_to_zero, gauss_legendre_on, integrate_adaptive, smoothstep};
use crate::search::{search, SearchParams};

/// The graph `h(y) = λy²/2 + a y⁴ + ψ(y)` over `|y| ≤ halfwidth`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbedParabola {
    pub lambda: f64,
    pub a: f64,
    #[serde(default)]
    pub psi: Vec<PsiTerm>,
    pub halfwidth: f64,
}

impl PerturbedParabola {
    pub fn new(lambda: f64, a: f64, halfwidth: f64) -> Result<Self> {
        let pp = PerturbedParabola { lambda, a, psi: Vec::new(), halfwidth };
        pp.spec().validate()?;
        Ok(pp)
    }

    /// Accepts `parabola` (with `a = 0`) and `perturbed_parabola` specs.
    pub fn from_spec(spec: &CurveSpec) -> Result<Self> {
        spec.validate()?;
        match spec {
            CurveSpec::Parabola { mu, halfwidth } => {
                Ok(PerturbedParabola { lambda: *mu, a: 0.0, psi: Vec::new(), halfwidth: *halfwidth })
            }
            CurveSpec::PerturbedParabola { lambda, a, psi, halfwidth } => {
                Ok(PerturbedParabola { lambda: *lambda, a: *a, psi: psi.clone(), halfwidth: *halfwidth })
            }
            _ => invalid("a perturbed parabola needs a parabola or perturbed_parabola curve"),
        }
    }

    pub fn spec(&self) -> CurveSpec {
        CurveSpec::PerturbedParabola {
            lambda: self.lambda,
            a: self.a,
            psi: self.psi.clone(),
            halfwidth: self.halfwidth,
        }
    }

    pub fn profile(&self) -> GraphProfile {
        GraphProfile { lambda: self.lambda, a: self.a, psi: self.psi.clone() }
    }

    /// Transition width of the cutoff `η_I`, one eighth of `|I|`.
    pub fn mollifier_margin(&self) -> f64 {
        self.halfwidth / 4.0
    }

    /// Upper end `(3/2)(λ/2)³` of the admissible quartic coefficients.
    pub fn quartic_threshold(&self) -> f64 {
        1.5 * (self.lambda / 2.0).powi(3)
    }

    /// Whether `(λ/2)³ ≤ a < (3/2)(λ/2)³`.
    pub fn satisfies_condition(&self) -> bool {
        (self.lambda / 2.0).powi(3) <= self.a && self.a < self.quartic_threshold()
    }

    /// `max |h′|` over the interval, sampled on 2001 points.
    pub fn max_slope(&self) -> f64 {
        let p = self.profile();
        (0..2001)
            .map(|i| p.eval(-self.halfwidth + 2.0 * self.halfwidth * i as f64 / 2000.0).1.abs())
            .fold(0.0, f64::max)
    }
}

/// Cutoff applied to the trial family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TrialCutoff {
    /// `η(u)` equal to one for `|u| ≤ K` and zero beyond `1.25K`, with
    /// `u = y/ε` and `K = multiple/√λ`.
    Fixed { multiple: f64 },
    /// `η_I(y/(ε log(1/ε)))` with `η_I` equal to one on `I` shrunk by the
    /// mollifier margin.
    LogScaled,
}

impl Default for TrialCutoff {
    fn default() -> Self {
        TrialCutoff::Fixed { multiple: 4.0 }
    }
}

/// Sampling of the trial family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrialControl {
    pub cutoff: TrialCutoff,
    /// Samples across the support of the cutoff.
    pub samples: usize,
}

impl Default for TrialControl {
    fn default() -> Self {
        TrialControl { cutoff: TrialCutoff::default(), samples: 4001 }
    }
}

/// Cutoff profile in the graph variable: support half-width and `η(y)`.
struct Cutoff {
    support: f64,
    eval: Box<dyn Fn(f64) -> f64 + Send + Sync>,
}

fn cutoff_for(pp: &PerturbedParabola, eps: f64, cutoff: TrialCutoff) -> Result<Cutoff> {
    match cutoff {
        TrialCutoff::Fixed { multiple } => {
            if !(multiple > 0.0 && multiple.is_finite()) {
                return invalid("cutoff multiple must be positive");
            }
            let k = multiple / pp.lambda.sqrt();
            Ok(Cutoff {
                support: 1.25 * k * eps,
                eval: Box::new(move |y: f64| 1.0 - smoothstep((y.abs() / eps - k) / (0.25 * k))),
            })
        }
        TrialCutoff::LogScaled => {
            let scale = eps * (1.0 / eps).ln();
            let w = pp.halfwidth;
            let m = pp.mollifier_margin();
            Ok(Cutoff {
                support: scale * w,
                eval: Box::new(move |y: f64| 1.0 - smoothstep(((y / scale).abs() - (w - m)) / m)),
            })
        }
    }
}

/// `f_ε(y) = ε^{−1/2}(G₀ + sign·εφ)(y/ε)·η(y)` on the arc of `pp` restricted
/// to the cutoff support, with arclength measure.
fn trial_signed(pp: &PerturbedParabola, eps: f64, sign: f64, ctrl: &TrialControl) -> Result<ArcFunction> {
    if !(eps > 0.0 && eps <= 0.5) {
        return invalid(format!("trial parameter must lie in (0, 0.5], got {eps}"));
    }
    pp.spec().validate()?;
    let cut = cutoff_for(pp, eps, ctrl.cutoff)?;
    if cut.support > pp.halfwidth * (1.0 + 1e-12) {
        return invalid(format!(
            "cutoff support {:.4} exceeds the interval half-width {}",
            cut.support, pp.halfwidth
        ));
    }
    let n = ctrl.samples | 1;
    let sub = PerturbedParabola { halfwidth: cut.support, ..pp.clone() };
    let arc = Arc::new(ConvexArc::build(&sub.spec(), n)?);
    let lam = pp.lambda;
    let c = odd_mode_constant(lam);
    let amp = eps.powf(-0.5);
    ArcFunction::from_param_fn(arc, MeasureKind::Arclength, |y| {
        let u = y / eps;
        let g = (-0.5 * lam * u * u).exp();
        Complex64::new(amp * g * (1.0 + sign * eps * c * u) * (cut.eval)(y), 0.0)
    })
}

/// The trial function `f_ε` of the variational family.
pub fn trial_function(pp: &PerturbedParabola, eps: f64, ctrl: &TrialControl) -> Result<ArcFunction> {
    trial_signed(pp, eps, 1.0, ctrl)
}

/// One evaluation of the deficit `Ξ(ε) = C_F[λ]⁶‖f_ε‖⁶ − ‖f̂_εσ̃‖₆⁶`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct XiValue {
    pub epsilon: f64,
    /// Sign of the odd mode in the trial function.
    pub odd_sign: f64,
    pub xi: f64,
    pub l2_term: f64,
    pub l6_term: f64,
    /// Uncertainty of `l6_term` from the tail extrapolation.
    pub l6_error: f64,
}

/// Controls for `Ξ`; the plane scale of `l6` is replaced by `(ε, ε²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct XiControl {
    pub trial: TrialControl,
    pub l6: L6Control,
}

fn xi_signed(pp: &PerturbedParabola, eps: f64, sign: f64, ctrl: &XiControl) -> Result<XiValue> {
    let f = trial_signed(pp, eps, sign, &ctrl.trial)?;
    let l2sq = f.lp_integral(2.0);
    let l2_term = foschi_constant_sixth(pp.lambda) * l2sq.powi(3);
    let l6 = l6_norm_direct(&f, &ctrl.l6.with_scale(eps, eps * eps))?;
    let l6_error = 6.0 * l6.value.powi(5) * l6.error_estimate;
    Ok(XiValue { epsilon: eps, odd_sign: sign, xi: l2_term - l6.sixth_power, l2_term, l6_term: l6.sixth_power, l6_error })
}

/// `Ξ(ε)` for the trial family on `pp`.
pub fn xi(pp: &PerturbedParabola, eps: f64, ctrl: &XiControl) -> Result<XiValue> {
    xi_signed(pp, eps, 1.0, ctrl)
}

/// Closed-form `Ξ″(0) = 8π^{3/2}λ^{−7/2}C_F[λ]⁶(a − 3λ³/16)`.
pub fn xi_second_derivative(lambda: f64, a: f64) -> f64 {
    8.0 * PI.powf(1.5) * lambda.powf(-3.5) * foschi_constant_sixth(lambda) * (a - 3.0 * lambda.powi(3) / 16.0)
}

/// Finite-difference estimate of `Ξ″(0)` from three trial parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct XiCurvature {
    pub epsilons: [f64; 3],
    /// Evaluations with the odd mode added; for a symmetric `ψ` these equal
    /// the evaluations with it subtracted.
    pub values: Vec<XiValue>,
    /// `(Ξ₊(ε) + Ξ₋(ε))/ε²` per trial parameter.
    pub quotients: [f64; 3],
    /// Quotients extrapolated quadratically in `ε²` to zero.
    pub extrapolated: f64,
    /// Second central difference of `Ξ` over the three (equally spaced) parameters.
    pub central_difference: f64,
    pub closed_form: f64,
    /// `|extrapolated − closed_form| / |closed_form|`.
    pub relative_error: f64,
}

/// Estimates `Ξ″(0)` from `Ξ` at three parameters.
///
/// `Ξ` is even in `ε` once the odd mode is symmetrized, so the quotients
/// `(Ξ₊ + Ξ₋)/ε²` equal `Ξ″(0) + O(ε²)` and are extrapolated in `ε²`.
/// When `ψ` has only even terms the reflection `y ↦ −y` maps `Ξ₋` to `Ξ₊`
/// and a single evaluation per parameter suffices.
pub fn xi_curvature(pp: &PerturbedParabola, epsilons: [f64; 3], ctrl: &XiControl) -> Result<XiCurvature> {
    if !(epsilons[0] > 0.0 && epsilons[0] < epsilons[1] && epsilons[1] < epsilons[2]) {
        return invalid("trial parameters must be positive and increasing");
    }
    let symmetric = pp.psi.iter().all(|t| t.degree % 2 == 0 || t.coeff == 0.0);
    let mut values = Vec::new();
    let mut quotients = [0.0; 3];
    for (k, &e) in epsilons.iter().enumerate() {
        let plus = xi_signed(pp, e, 1.0, ctrl)?;
        let minus = if symmetric { plus.xi } else { xi_signed(pp, e, -1.0, ctrl)?.xi };
        quotients[k] = (plus.xi + minus) / (e * e);
        values.push(plus);
    }
    let z = epsilons.map(|e| e * e);
    let extrapolated = extrapolate_quadratic_to_zero(z, quotients);
    let h = 0.5 * (epsilons[2] - epsilons[0]);
    let central_difference = (values[0].xi - 2.0 * values[1].xi + values[2].xi) / (h * h);
    let closed_form = xi_second_derivative(pp.lambda, pp.a);
    let relative_error = (extrapolated - closed_form).abs() / closed_form.abs();
    Ok(XiCurvature { epsilons, values, quotients, extrapolated, central_difference, closed_form, relative_error })
}

/// Moments `∫ y^n e^{−λy²} dy`.
fn gaussian_moment(n: usize, lambda: f64) -> f64 {
    if n % 2 == 1 {
        return 0.0;
    }
    let mut m = (PI / lambda).sqrt();
    for k in (1..n).step_by(2) {
        m *= k as f64 / (2.0 * lambda);
    }
    m
}

/// Value of `Q(φ)` with its natural scale `3C_F⁶‖G₀‖⁴‖φ‖²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QValue {
    pub value: f64,
    pub scale: f64,
    pub norm_sq: f64,
    /// `Re ∫ G₀φ`.
    pub overlap: f64,
    /// `∬ |G₁|⁴|φ₁|²`.
    pub modulus_term: f64,
    /// `Re ∬ |G₁|²Ḡ₁²φ₁²`.
    pub phase_term: f64,
}

/// The quadratic form `Q` at the Gaussian `G₀ = e^{−λy²/2}` for inputs of the
/// form `φ(y) = Σ_k c_k y^k e^{−λy²/2}`.
///
/// Plane integrals use `t = tan α`, `x = v(λ(1+t²))^{1/2}`, which maps the
/// plane to `(−π/2, π/2) × ℝ` with Jacobian `λ^{1/2} sec³α`; the integrands
/// are smooth and Gaussian in `v`, so a tensor Gauss–Legendre rule on
/// `|v| ≤ 8` is exact to rounding.
#[derive(Debug, Clone)]
pub struct QuadraticForm {
    lambda: f64,
    nodes: Vec<(f64, f64, f64)>,
    g1: Vec<Complex64>,
}

impl QuadraticForm {
    pub fn new(lambda: f64) -> Result<Self> {
        Self::with_orders(lambda, 96, 12)
    }

    /// `alpha_order` nodes in `α`; eight panels of `v_order` nodes in `v`.
    pub fn with_orders(lambda: f64, alpha_order: usize, v_order: usize) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return invalid("lambda must be positive");
        }
        if alpha_order < 8 || v_order < 4 {
            return invalid("quadrature orders are too small");
        }
        let (alphas, wa) = gauss_legendre_on(alpha_order, -0.5 * PI, 0.5 * PI);
        let mut vs = Vec::new();
        let mut wv = Vec::new();
        for p in 0..8 {
            let lo = -8.0 + 2.0 * p as f64;
            let (x, w) = gauss_legendre_on(v_order, lo, lo + 2.0);
            vs.extend(x);
            wv.extend(w);
        }
        let mut nodes = Vec::with_capacity(alphas.len() * vs.len());
        for (&al, &wal) in alphas.iter().zip(&wa) {
            let t = al.tan();
            let sec = 1.0 / al.cos();
            let stretch = (lambda * (1.0 + t * t)).sqrt();
            for (&v, &wvv) in vs.iter().zip(&wv) {
                nodes.push((v * stretch, t, wal * wvv * lambda.sqrt() * sec.powi(3)));
            }
        }
        let g1 = nodes.iter().map(|&(x, t, _)| gaussian_closed_form(GaussianKind::G1, lambda, x, t)).collect();
        Ok(QuadraticForm { lambda, nodes, g1 })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `Q(φ)` for `φ(y) = Σ_k coeffs[k] y^k e^{−λy²/2}`.
    pub fn evaluate(&self, coeffs: &[Complex64]) -> QValue {
        let lam = self.lambda;
        let c6 = foschi_constant_sixth(lam);
        let g0sq = gaussian_moment(0, lam);
        let mut norm_sq = Complex64::new(0.0, 0.0);
        for (j, cj) in coeffs.iter().enumerate() {
            for (k, ck) in coeffs.iter().enumerate() {
                norm_sq += cj.conj() * ck * gaussian_moment(j + k, lam);
            }
        }
        let norm_sq = norm_sq.re;
        let overlap: f64 = coeffs.iter().enumerate().map(|(k, c)| c.re * gaussian_moment(k, lam)).sum();
        let terms = map_indexed(self.nodes.len(), |i| {
            let (x, t, w) = self.nodes[i];
            let g = self.g1[i];
            let p = gauss_poly_extension(coeffs, lam, x, t);
            let gg = g.norm_sqr();
            (w * gg * gg * p.norm_sqr(), w * (gg * g.conj() * g.conj() * p * p).re)
        });
        let modulus_term: f64 = terms.iter().map(|t| t.0).sum();
        let phase_term: f64 = terms.iter().map(|t| t.1).sum();
        let value = 3.0 * c6 * g0sq * g0sq * norm_sq + 12.0 * c6 * g0sq * overlap * overlap
            - 9.0 * modulus_term
            - 6.0 * phase_term;
        QValue { value, scale: 3.0 * c6 * g0sq * g0sq * norm_sq, norm_sq, overlap, modulus_term, phase_term }
    }
}

/// The odd mode `c_λ y e^{−λy²/2}` as Gaussian-polynomial coefficients.
pub fn odd_mode_coefficients(lambda: f64) -> Vec<Complex64> {
    vec![Complex64::new(0.0, 0.0), Complex64::new(odd_mode_constant(lambda), 0.0)]
}

/// The six symmetry directions `G₀, iG₀, yG₀, iyG₀, y²G₀, iy²G₀`.
pub fn kernel_directions() -> Vec<(&'static str, Vec<Complex64>)> {
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    vec![
        ("g0", vec![one]),
        ("i_g0", vec![i]),
        ("y_g0", vec![z, one]),
        ("i_y_g0", vec![z, i]),
        ("y2_g0", vec![z, z, one]),
        ("i_y2_g0", vec![z, z, i]),
    ]
}

/// A numeric integral next to its closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegralPair {
    pub numeric: f64,
    pub closed_form: f64,
    pub abs_error: f64,
    /// Relative error, or the absolute error when the closed form vanishes.
    pub rel_error: f64,
}

impl IntegralPair {
    fn new(numeric: f64, closed_form: f64) -> Self {
        let abs_error = (numeric - closed_form).abs();
        let rel_error = if closed_form == 0.0 { abs_error } else { abs_error / closed_form.abs() };
        IntegralPair { numeric, closed_form, abs_error, rel_error }
    }
}

/// The quartic-free plane integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FirstIntegrals {
    /// `∬ (1+t²)^{−5/2} e^{−3x²/(λ(1+t²))}`.
    pub i: IntegralPair,
    /// `∬ (1−t²)(1+t²)^{−7/2} x² e^{−3x²/(λ(1+t²))}`.
    pub ii: IntegralPair,
    /// `3λ² Re ∬ |G₁|⁴ Ḡ₁ G₂`.
    pub total: IntegralPair,
}

/// The plane integrals weighted by the quartic coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuarticIntegrals {
    /// `∬ 2t²(1+t²)^{−7/2} e^{−3x²/(λ(1+t²))}`.
    pub i: IntegralPair,
    /// `∬ (3t²−t⁴)(1+t²)^{−9/2} x² e^{−3x²/(λ(1+t²))}`.
    pub ii: IntegralPair,
    /// `∬ (4t²−4t⁴)(1+t²)^{−11/2} x⁴ e^{−3x²/(λ(1+t²))}`.
    pub iii: IntegralPair,
    /// `−6a ∬ Re{it |G₁|⁴ Ḡ₁ G₃}`.
    pub total: IntegralPair,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExplicitIntegrals {
    pub lambda: f64,
    pub a: f64,
    pub first: FirstIntegrals,
    pub quartic: QuarticIntegrals,
}

impl ExplicitIntegrals {
    /// Largest relative error over the nonzero closed forms.
    pub fn max_rel_error(&self) -> f64 {
        let pairs = [self.first.i, self.first.total, self.quartic.i, self.quartic.iii, self.quartic.total];
        pairs.iter().filter(|p| p.closed_form != 0.0).map(|p| p.rel_error).fold(0.0, f64::max)
    }

    /// Largest absolute error over the vanishing closed forms.
    pub fn max_zero_error(&self) -> f64 {
        let mut pairs = vec![self.first.ii, self.quartic.ii];
        if self.quartic.total.closed_form == 0.0 {
            pairs.push(self.quartic.total);
        }
        pairs.iter().map(|p| p.abs_error).fold(0.0, f64::max)
    }
}

/// `∬ F(x, t) dx dt` by nested adaptive quadrature after the compactifying
/// change of variables `t = tan α`, `x = v(λ(1+t²))^{1/2}`.
fn plane_integral(lambda: f64, f: impl Fn(f64, f64) -> f64) -> Result<f64> {
    let inner_tol = 1e-15;
    let outer = integrate_adaptive(
        |al: f64| {
            let t = al.tan();
            let stretch = (lambda * (1.0 + t * t)).sqrt();
            let jac = lambda.sqrt() / al.cos().powi(3);
            match integrate_adaptive(|v| f(v * stretch, t) * jac, -8.0, 8.0, inner_tol, 1e-13, 400) {
                Ok(q) => q.value,
                Err(_) => f64::NAN,
            }
        },
        -0.5 * PI,
        0.5 * PI,
        1e-15,
        1e-12,
        400,
    )?;
    Ok(outer.value)
}

/// Evaluates the explicit plane integrals entering `Ξ″(0)` and pairs each
/// with its closed form.
pub fn explicit_integrals(lambda: f64, a: f64) -> Result<ExplicitIntegrals> {
    if !(lambda > 0.0 && lambda.is_finite()) || !a.is_finite() {
        return invalid("lambda must be positive and a finite");
    }
    let c6 = foschi_constant_sixth(lambda);
    let p32 = PI.powf(1.5);
    let s3 = 3f64.sqrt();
    let gauss = |x: f64, t: f64| (-3.0 * x * x / (lambda * (1.0 + t * t))).exp();
    let q = |t: f64| 1.0 + t * t;

    let i1 = plane_integral(lambda, |x, t| q(t).powf(-2.5) * gauss(x, t))?;
    let ii1 = plane_integral(lambda, |x, t| (1.0 - t * t) * q(t).powf(-3.5) * x * x * gauss(x, t))?;
    let total1 = plane_integral(lambda, |x, t| {
        let g1 = gaussian_closed_form(GaussianKind::G1, lambda, x, t);
        let g2 = gaussian_closed_form(GaussianKind::G2, lambda, x, t);
        3.0 * lambda * lambda * (g1.norm_sqr().powi(2) * g1.conj() * g2).re
    })?;
    let first = FirstIntegrals {
        i: IntegralPair::new(i1, p32 * lambda.sqrt() / (2.0 * s3)),
        ii: IntegralPair::new(ii1, 0.0),
        total: IntegralPair::new(total1, 1.5 * p32 * lambda.powf(-0.5) * c6),
    };

    let i2 = plane_integral(lambda, |x, t| 2.0 * t * t * q(t).powf(-3.5) * gauss(x, t))?;
    let ii2 = plane_integral(lambda, |x, t| (3.0 * t * t - t.powi(4)) * q(t).powf(-4.5) * x * x * gauss(x, t))?;
    let iii2 =
        plane_integral(lambda, |x, t| (4.0 * t * t - 4.0 * t.powi(4)) * q(t).powf(-5.5) * x.powi(4) * gauss(x, t))?;
    let total2 = plane_integral(lambda, |x, t| {
        let g1 = gaussian_closed_form(GaussianKind::G1, lambda, x, t);
        let g3 = gaussian_closed_form(GaussianKind::G3, lambda, x, t);
        -6.0 * a * (Complex64::new(0.0, t) * g1.norm_sqr().powi(2) * g1.conj() * g3).re
    })?;
    let quartic = QuarticIntegrals {
        i: IntegralPair::new(i2, p32 * lambda.sqrt() / (4.0 * s3)),
        ii: IntegralPair::new(ii2, 0.0),
        iii: IntegralPair::new(iii2, -p32 * lambda.powf(2.5) / (12.0 * s3)),
        total: IntegralPair::new(total2, -4.0 * a * p32 * lambda.powf(-3.5) * c6),
    };
    Ok(ExplicitIntegrals { lambda, a, first, quartic })
}

/// Parameters of the constant comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CompareParams {
    /// Trial parameter of the seed.
    pub epsilon: f64,
    /// Cutoff multiple `K√λ` of the seed.
    pub cutoff_multiple: f64,
    /// Arclength of the seed centre; defaults to the vertex of a graph arc
    /// and to an interior curvature minimum otherwise.
    pub center: Option<f64>,
    /// Iteration controls; the plane scale is replaced by `(ε/√λ, ε²/λ)`.
    pub search: SearchParams,
}

impl Default for CompareParams {
    fn default() -> Self {
        CompareParams {
            epsilon: 0.1,
            cutoff_multiple: 4.0,
            center: None,
            search: SearchParams { max_iters: 8, ..SearchParams::default() } }
    }
}

/// Outcome of the constant comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub lambda_min: f64,
    /// Arclength of the seed centre.
    pub seed_center: f64,
    /// Curvature at the seed centre; the comparison is against `C_F` there.
    pub lambda: f64,
    pub k2_holds: bool,
    pub c_f_lambda: f64,
    pub seed_rayleigh: f64,
    pub c_hat_lower: f64,
    /// Tail-model uncertainty of the best Rayleigh quotient.
    pub tail_error: f64,
    /// Change of the best Rayleigh quotient under a refined plane quadrature.
    pub refinement_gap: f64,
    pub combined_error: f64,
    /// `Ĉ − C_F[λ]`.
    pub margin: f64,
    pub strict: bool,
    pub iterations: usize,
}

/// The trial family in the tangent coordinate at arclength `s0`:
/// `(G₀ + εφ)(y/ε)·η(y/ε)` with `y = (γ(s) − γ(s0))·T(s0)`.
pub fn local_trial(arc: Arc<ConvexArc>, s0: f64, lambda: f64, eps: f64, multiple: f64) -> Result<ArcFunction> {
    if !(eps > 0.0 && eps <= 0.5) {
        return invalid(format!("trial parameter must lie in (0, 0.5], got {eps}"));
    }
    if !(lambda > 0.0 && multiple > 0.0) {
        return invalid("curvature and cutoff multiple must be positive");
    }
    let k = multiple / lambda.sqrt();
    let c = odd_mode_constant(lambda);
    let p0 = arc.gamma_at(s0);
    let th0 = arc.theta_at(s0);
    let (ct, st) = (th0.cos(), th0.sin());
    let mut values = Vec::with_capacity(arc.n());
    for ((g, &th), &s) in arc.gamma().iter().zip(arc.theta()).zip(arc.s()) {
        let y = (g[0] - p0[0]) * ct + (g[1] - p0[1]) * st;
        let u = y / eps;
        let on_branch = (th - th0).abs() < 0.5 * PI && (s - s0) * y >= 0.0;
        let v = if on_branch && u.abs() < 1.25 * k {
            let eta = 1.0 - smoothstep((u.abs() - k) / (0.25 * k));
            (-0.5 * lambda * u * u).exp() * (1.0 + eps * c * u) * eta
        } else {
            0.0
        };
        values.push(v);
    }
    if values[0] != 0.0 || values[values.len() - 1] != 0.0 {
        return invalid("the trial cutoff support extends past the end of the arc");
    }
    ArcFunction::from_real(arc, values, MeasureKind::Arclength)
}

/// Compares a lower bound `Ĉ[Γ]` from the ascent search, seeded with the
/// trial family at the curvature minimum, against `C_F[λ]`.
pub fn compare_constants(arc: Arc<ConvexArc>, params: &CompareParams) -> Result<CompareReport> {
    let k2 = check_k2_condition(&arc);
    let s0 = match params.center {
        Some(c) if (0.0..=arc.length()).contains(&c) => c,
        Some(c) => return invalid(format!("seed centre {c} lies outside [0, {}]", arc.length())),
        None if arc.is_graph() => {
            let th = arc.theta();
            let v = (0..th.len()).min_by(|&i, &j| th[i].abs().total_cmp(&th[j].abs())).unwrap_or(0);
            arc.s()[v]
        }
        None => {
            let m = k2.minima.iter().find(|m| !m.at_endpoint).or(k2.minima.first());
            match m {
                Some(m) => m.s,
                None => return invalid("no curvature minimum found"),
            }
        }
    };
    let lambda = arc.kappa_at(s0);
    let arc = Arc::new(arc.aligned_at(s0));
    let eps = params.epsilon;
    let f0 = local_trial(arc.clone(), s0, lambda, eps, params.cutoff_multiple)?;
    let mut sp = params.search;
    let scale = eps / lambda.sqrt();
    sp.l6 = sp.l6.with_scale(scale, scale * scale);
    let seed_rayleigh = rayleigh(&f0, &sp.l6)?.value;
    let result = search(&f0, &sp)?;
    let refined = L6Control { radial_order: sp.l6.radial_order + 2, angles: sp.l6.angles * 2, ..sp.l6 };
    let check = rayleigh(&result.best, &refined)?;
    let refinement_gap = (check.value - result.c_lower).abs();
    let tail_error = result.c_lower_error;
    let combined_error = tail_error + refinement_gap;
    let c_f_lambda = foschi_constant(lambda);
    let margin = result.c_lower - c_f_lambda;
    Ok(CompareReport {
        lambda_min: arc.lambda_min(),
        seed_center: s0,
        lambda,
        k2_holds: k2.holds,
        c_f_lambda,
        seed_rayleigh,
        c_hat_lower: result.c_lower,
        tail_error,
        refinement_gap,
        combined_error,
        margin,
        strict: margin > 3.0 * combined_error,
        iterations: result.trace.len().saturating_sub(1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_second_derivative() {
        assert_eq!(xi_second_derivative(1.0, 3.0 / 16.0), 0.0);
        let v = xi_second_derivative(1.0, 0.125);
        let expect = -8.0 * PI.powf(1.5) * (2.0 * PI).powi(3) / 3f64.sqrt() / 16.0;
        assert!((v - expect).abs() < 1e-10 * expect.abs());
        assert!((v + 398.7).abs() < 0.1);
    }

    #[test]
    fn gaussian_moments() {
        assert!((gaussian_moment(2, 2.0) - (PI / 2.0).sqrt() / 4.0).abs() < 1e-15);
        assert!((gaussian_moment(4, 1.0) - 0.75 * PI.sqrt()).abs() < 1e-15);
        assert_eq!(gaussian_moment(3, 1.0), 0.0);
    }

    #[test]
    fn odd_mode_is_in_kernel() {
        let q = QuadraticForm::new(1.0).unwrap();
        let v = q.evaluate(&odd_mode_coefficients(1.0));
        assert!((v.norm_sq - 1.0).abs() < 1e-12);
        assert!(v.value.abs() < 1e-4 * v.scale, "{v:?}");
    }

    #[test]
    fn trial_support_must_fit() {
        let pp = PerturbedParabola::new(1.0, 0.125, 0.4).unwrap();
        assert!(trial_function(&pp, 0.1, &TrialControl::default()).is_err());
        assert!(trial_function(&pp, 0.05, &TrialControl::default()).is_ok());
    }
}
