//! The extension operator `f ↦ f̂σ`, its L⁶ norm, the Rayleigh quotient and
//! closed-form Gaussian extensions on dilated parabolas.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{invalid, numerical, Result};
use crate::field::{ArcFunction, ComplexField, PlaneGrid};
use crate::par::map_indexed;
use crate::quadrature::{gauss_legendre, tail_fit_inverse, tail_fit_three};

/// Sharp extension constant of the parabola `z = μy²/2` with projection measure.
pub fn foschi_constant(mu: f64) -> f64 {
    (2.0 * PI).sqrt() * 3f64.powf(-1.0 / 12.0) * mu.powf(-1.0 / 6.0)
}

/// Sixth power of [`foschi_constant`], `(2π)³/(√3 μ)`.
pub fn foschi_constant_sixth(mu: f64) -> f64 {
    (2.0 * PI).powi(3) / (3f64.sqrt() * mu)
}

/// Normalizing constant `(π/(4λ³))^{−1/4}` of `u·e^{−λu²/2}`.
pub fn odd_mode_constant(lambda: f64) -> f64 {
    (PI / (4.0 * lambda.powi(3))).powf(-0.25)
}

/// Which closed-form Gaussian extension to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GaussianKind {
    /// Extension of `e^{−λy²/2}`.
    G1,
    /// `2λ⁻¹ i ∂_t G1`.
    G2,
    /// `−4λ⁻² ∂_t² G1`.
    G3,
    /// Extension of `c_λ y e^{−λy²/2}`.
    Phi1,
}

/// Closed-form Gaussian extensions on the parabola `λy²/2`.
///
/// Uses the reflected convention `∫ f(y) e^{i(xy − tλy²/2)} dy`, i.e. the value
/// of `f̂σ` at `(−x, t)`; powers of `1 + it` take the principal branch.
pub fn gaussian_closed_form(kind: GaussianKind, lambda: f64, x: f64, t: f64) -> Complex64 {
    let w = Complex64::new(1.0, t);
    let winv = w.inv();
    let g1 = (2.0 * PI / lambda).sqrt() * w.powf(-0.5) * (-(x * x) / (2.0 * lambda) * winv).exp();
    match kind {
        GaussianKind::G1 => g1,
        GaussianKind::G2 => (winv / lambda - x * x / (lambda * lambda) * winv * winv) * g1,
        GaussianKind::G3 => {
            let (w2, w3, w4) = (winv * winv, winv * winv * winv, winv * winv * winv * winv);
            (3.0 / lambda.powi(2) * w2 - 6.0 * x * x / lambda.powi(3) * w3 + x.powi(4) / lambda.powi(4) * w4) * g1
        }
        GaussianKind::Phi1 => {
            let c = odd_mode_constant(lambda);
            Complex64::new(0.0, c / lambda) * (2.0 * PI / lambda).sqrt() * w.powf(-1.5) * x
                * (-(x * x) / (2.0 * lambda) * winv).exp()
        }
    }
}

/// Probabilists' Hermite polynomials `He_0..He_n` at a complex point.
fn hermite_he(n: usize, z: Complex64) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(1.0, 0.0)];
    if n >= 1 {
        out.push(z);
    }
    for k in 1..n {
        let next = z * out[k] - out[k - 1] * k as f64;
        out.push(next);
    }
    out
}

/// Extension of `Σ_k c_k y^k e^{−λy²/2}` in the reflected convention of
/// [`gaussian_closed_form`].
pub fn gauss_poly_extension(coeffs: &[Complex64], lambda: f64, x: f64, t: f64) -> Complex64 {
    if coeffs.is_empty() {
        return Complex64::new(0.0, 0.0);
    }
    let a = Complex64::new(lambda, lambda * t);
    let sa = a.sqrt();
    let z = x / sa;
    let he = hermite_he(coeffs.len() - 1, z);
    let base = (2.0 * PI / a).sqrt() * (-(x * x) / (2.0 * a)).exp();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut factor = Complex64::new(1.0, 0.0);
    let step = Complex64::new(0.0, 1.0) / sa;
    for (c, h) in coeffs.iter().zip(&he) {
        acc += c * factor * h;
        factor *= step;
    }
    acc * base
}

/// `f̂σ` sampled on a plane grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Extension {
    pub field: ComplexField,
    /// `max |(x, t)| · h` with `h` the largest arclength step on the support of `f`.
    pub resolution: f64,
    /// Set when `resolution > 0.5`; values are still returned.
    pub under_resolved: bool,
}

/// Largest arclength step between consecutive samples where `f` is non-negligible.
fn support_step(f: &ArcFunction) -> f64 {
    let vals = f.values();
    let peak = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let cut = 1e-8 * peak;
    let s = f.arc().s();
    let mut h: f64 = 0.0;
    for i in 0..vals.len() - 1 {
        if vals[i].norm() > cut || vals[i + 1].norm() > cut {
            h = h.max(s[i + 1] - s[i]);
        }
    }
    h
}

/// Evaluates `f̂σ(x, t) = ∫ f(γ(s)) e^{−i(x,t)·γ(s)} dσ(s)` at every grid node.
pub fn extend(f: &ArcFunction, grid: &PlaneGrid) -> Result<Extension> {
    grid.validate()?;
    let w = f.weights();
    let gamma = f.arc().gamma();
    let active: Vec<(Complex64, [f64; 2])> = f
        .values()
        .iter()
        .zip(&w)
        .zip(gamma)
        .filter(|((v, _), _)| v.re != 0.0 || v.im != 0.0)
        .map(|((v, w), g)| (v * w, *g))
        .collect();
    let values = map_indexed(grid.len(), |k| {
        let (x, t) = grid.node(k);
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, g) in &active {
            let phase = -(x * g[0] + t * g[1]);
            acc += c * Complex64::new(phase.cos(), phase.sin());
        }
        acc
    });
    let resolution = grid.max_radius() * support_step(f);
    Ok(Extension {
        field: ComplexField::new(*grid, values)?,
        resolution,
        under_resolved: resolution > 0.5,
    })
}

/// Discretization of the plane integral `∫∫ |f̂σ|⁶`.
///
/// The plane is covered by a polar grid: radial Gauss–Legendre panels of width
/// `radial_panel` with `radial_order` nodes each, and `angles` equispaced
/// angles over a half turn (real inputs) or a full turn (complex inputs).
/// Integrals are accumulated up to each radius in `radii`, which are given in
/// the rescaled plane `(x·scale[0], t·scale[1])`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct L6Control {
    pub radii: [f64; 3],
    pub radial_panel: f64,
    pub radial_order: usize,
    pub angles: usize,
    pub scale: [f64; 2],
}

impl Default for L6Control {
    fn default() -> Self {
        L6Control { radii: [16.0, 32.0, 64.0], radial_panel: 0.5, radial_order: 6, angles: 128, scale: [1.0, 1.0] }
    }
}

impl L6Control {
    pub fn validate(&self) -> Result<()> {
        let r = self.radii;
        if !(r[0] > 0.0 && r[0] < r[1] && r[1] < r[2] && r[2].is_finite()) {
            return invalid(format!("truncation radii must be increasing and positive, got {r:?}"));
        }
        if !(self.radial_panel > 0.0 && self.radial_panel.is_finite()) {
            return invalid("radial panel width must be positive");
        }
        for &rk in &r {
            let p = rk / self.radial_panel;
            if (p - p.round()).abs() > 1e-9 * p.max(1.0) {
                return invalid(format!("radius {rk} is not a multiple of the panel width {}", self.radial_panel));
            }
        }
        if self.radial_order == 0 || self.radial_order > 64 {
            return invalid("radial order must be in 1..=64");
        }
        if self.angles < 4 {
            return invalid("at least four angles are required");
        }
        if !(self.scale[0] > 0.0 && self.scale[1] > 0.0) {
            return invalid("plane scale factors must be positive");
        }
        Ok(())
    }

    /// Same control with the plane rescaled so that `scale` units map to one.
    pub fn with_scale(mut self, sx: f64, st: f64) -> Self {
        self.scale = [sx, st];
        self
    }

    fn panels(&self) -> [usize; 3] {
        self.radii.map(|r| (r / self.radial_panel).round() as usize)
    }
}

/// Outcome of a direct L⁶ evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct L6Result {
    /// Extrapolated `‖f̂σ‖₆`.
    pub value: f64,
    /// Discrepancy between two tail models, in norm units.
    pub error_estimate: f64,
    /// Extrapolated `∫∫ |f̂σ|⁶`.
    pub sixth_power: f64,
    /// Truncated integrals at the three radii.
    pub partial: [f64; 3],
    /// Largest rescaled radius times the largest scaled sample step on the support.
    pub resolution: f64,
}

/// Samples prepared for the polar march: weighted values and rescaled,
/// centred positions of the non-zero samples.
struct Prepared {
    re: Vec<f64>,
    im: Vec<f64>,
    pos: Vec<[f64; 2]>,
    index: Vec<usize>,
    real: bool,
    offset: f64,
    jacobian: f64,
    resolution: f64,
}

fn prepare(f: &ArcFunction, ctrl: &L6Control, all_samples: bool) -> Prepared {
    let w = f.weights();
    let arc = f.arc();
    let [sx, sy] = ctrl.scale;
    let mut index = Vec::new();
    let mut mass = 0.0;
    let mut centre = [0.0, 0.0];
    for (i, v) in f.values().iter().enumerate() {
        if all_samples || v.re != 0.0 || v.im != 0.0 {
            index.push(i);
            let m = v.norm() * w[i].abs();
            mass += m;
            centre[0] += m * arc.gamma()[i][0];
            centre[1] += m * arc.gamma()[i][1];
        }
    }
    if mass > 0.0 {
        centre = [centre[0] / mass, centre[1] / mass];
    }
    let pos: Vec<[f64; 2]> =
        index.iter().map(|&i| [(arc.gamma()[i][0] - centre[0]) / sx, (arc.gamma()[i][1] - centre[1]) / sy]).collect();
    let re = index.iter().map(|&i| f.values()[i].re * w[i]).collect();
    let im = index.iter().map(|&i| f.values()[i].im * w[i]).collect();
    let th = arc.theta();
    let tangent_angle = |t: f64| (t.sin() / sy).atan2(t.cos() / sx);
    let offset = 0.5 * (tangent_angle(th[0]) + tangent_angle(th[th.len() - 1])) + 0.5 * PI;
    let peak = index.iter().map(|&i| f.values()[i].norm()).fold(0.0, f64::max);
    let significant = |i: usize| f.values()[i].norm() > 1e-8 * peak;
    let mut step: f64 = 0.0;
    for k in 1..pos.len() {
        if index[k] == index[k - 1] + 1 && (significant(index[k]) || significant(index[k - 1])) {
            step = step.max((pos[k][0] - pos[k - 1][0]).hypot(pos[k][1] - pos[k - 1][1]));
        }
    }
    Prepared {
        re,
        im,
        pos,
        index,
        real: f.is_real(),
        offset,
        jacobian: 1.0 / (sx * sy),
        resolution: ctrl.radii[2] * step,
    }
}

/// Integrates `|F|⁶` over the polar grid for one (angle, radial node) ray,
/// returning per-panel sums and, when requested, the adjoint samples
/// `Σ_p W_p e^{+i r_p ω·γ_j}` with `W_p = weight·|F|⁴F`.
struct Ray {
    panel_sums: Vec<f64>,
    adjoint: Option<Vec<Complex64>>,
}

fn march_ray(
    prep: &Prepared,
    ctrl: &L6Control,
    omega: f64,
    node: f64,
    node_weight: f64,
    angle_weight: f64,
    panels: usize,
    adjoint: bool,
) -> Ray {
    let n = prep.pos.len();
    let (c, s) = (omega.cos(), omega.sin());
    let width = ctrl.radial_panel;
    let mut er = vec![0.0; n];
    let mut ei = vec![0.0; n];
    let mut sr = vec![0.0; n];
    let mut si = vec![0.0; n];
    let mut proj = vec![0.0; n];
    for j in 0..n {
        let a = c * prep.pos[j][0] + s * prep.pos[j][1];
        proj[j] = a;
        let (ps, pc) = (-node * a).sin_cos();
        er[j] = prep.re[j] * pc - prep.im[j] * ps;
        ei[j] = prep.re[j] * ps + prep.im[j] * pc;
        let (qs, qc) = (-width * a).sin_cos();
        sr[j] = qc;
        si[j] = qs;
    }
    let mut panel_sums = vec![0.0; panels];
    let mut weights_w = if adjoint { vec![Complex64::new(0.0, 0.0); panels] } else { Vec::new() };
    for p in 0..panels {
        let mut fr = 0.0;
        let mut fi = 0.0;
        for j in 0..n {
            fr += er[j];
            fi += ei[j];
            let nr = er[j] * sr[j] - ei[j] * si[j];
            let ni = er[j] * si[j] + ei[j] * sr[j];
            er[j] = nr;
            ei[j] = ni;
        }
        let r = p as f64 * width + node;
        let weight = node_weight * r * angle_weight;
        let m2 = fr * fr + fi * fi;
        panel_sums[p] = weight * m2 * m2 * m2;
        if adjoint {
            weights_w[p] = Complex64::new(fr, fi) * (weight * m2 * m2);
        }
    }
    let adjoint = adjoint.then(|| {
        (0..n)
            .map(|j| {
                let a = proj[j];
                let z = Complex64::new((width * a).cos(), (width * a).sin());
                let mut acc = Complex64::new(0.0, 0.0);
                for p in (0..panels).rev() {
                    acc = acc * z + weights_w[p];
                }
                acc * Complex64::new((node * a).cos(), (node * a).sin())
            })
            .collect()
    });
    Ray { panel_sums, adjoint }
}

struct March {
    partial: [f64; 3],
    adjoint: Option<Vec<Complex64>>,
}

const RAY_BLOCK: usize = 64;

fn polar_march(prep: &Prepared, ctrl: &L6Control, adjoint: bool) -> March {
    let panels = ctrl.panels();
    let total_panels = panels[2];
    let (gx, gw) = gauss_legendre(ctrl.radial_order);
    let width = ctrl.radial_panel;
    let m = ctrl.angles;
    let (span, doubling) = if prep.real { (PI, 2.0) } else { (2.0 * PI, 1.0) };
    let dphi = span / m as f64;
    let start = if prep.real { prep.offset - 0.5 * PI } else { prep.offset - PI };
    let q = ctrl.radial_order;
    let rays = m * q;
    let mut panel_totals = vec![0.0; total_panels];
    let mut adj = adjoint.then(|| vec![Complex64::new(0.0, 0.0); prep.pos.len()]);
    let mut first = 0;
    while first < rays {
        let count = RAY_BLOCK.min(rays - first);
        let block = map_indexed(count, |k| {
            let idx = first + k;
            let (mi, qi) = (idx / q, idx % q);
            let omega = start + (mi as f64 + 0.5) * dphi;
            let node = 0.5 * width * (1.0 + gx[qi]);
            let node_weight = 0.5 * width * gw[qi];
            march_ray(prep, ctrl, omega, node, node_weight, dphi, total_panels, adjoint)
        });
        for ray in block {
            for (t, v) in panel_totals.iter_mut().zip(&ray.panel_sums) {
                *t += v;
            }
            if let (Some(acc), Some(a)) = (adj.as_mut(), ray.adjoint) {
                for (x, y) in acc.iter_mut().zip(a) {
                    *x += y;
                }
            }
        }
        first += count;
    }
    let scale = doubling * prep.jacobian;
    let mut partial = [0.0; 3];
    let mut running = 0.0;
    let mut k = 0;
    for (p, v) in panel_totals.iter().enumerate() {
        running += v;
        while k < 3 && p + 1 == panels[k] {
            partial[k] = running * scale;
            k += 1;
        }
    }
    if let Some(a) = adj.as_mut() {
        for v in a.iter_mut() {
            *v *= scale;
        }
    }
    March { partial, adjoint: adj }
}

fn finish_l6(partial: [f64; 3], ctrl: &L6Control, resolution: f64) -> Result<L6Result> {
    if partial.iter().all(|v| *v == 0.0) {
        return Ok(L6Result { value: 0.0, error_estimate: 0.0, sixth_power: 0.0, partial, resolution });
    }
    if !(partial[0] <= partial[1] && partial[1] <= partial[2]) || partial.iter().any(|v| !v.is_finite()) {
        return numerical(format!(
            "truncated L6 integrals are not monotone in the radius: {partial:?} at radii {:?}",
            ctrl.radii
        ));
    }
    let (three, _, _) = tail_fit_three(ctrl.radii, partial);
    let (inverse, _) = tail_fit_inverse(&ctrl.radii, &partial);
    if !(three > 0.0) {
        return numerical(format!("tail extrapolation produced a non-positive integral {three:.6e}"));
    }
    let value = three.powf(1.0 / 6.0);
    let error_estimate = (value - inverse.max(0.0).powf(1.0 / 6.0)).abs();
    Ok(L6Result { value, error_estimate, sixth_power: three, partial, resolution })
}

/// `‖f̂σ‖_{L⁶(ℝ²)}` by polar quadrature with tail extrapolation.
///
/// The truncated integrals `I(R_k)` are fitted exactly by
/// `I∞ − c/R + d/R³`; the error estimate is the distance between that value
/// and a least-squares `I∞ − c/R` fit.
pub fn l6_norm_direct(f: &ArcFunction, ctrl: &L6Control) -> Result<L6Result> {
    ctrl.validate()?;
    let prep = prepare(f, ctrl, false);
    if prep.pos.is_empty() {
        return finish_l6([0.0; 3], ctrl, 0.0);
    }
    let march = polar_march(&prep, ctrl, false);
    finish_l6(march.partial, ctrl, prep.resolution)
}

/// L⁶ norm together with the pullback `g(s) = ∬ |F|⁴F e^{+i(x,t)·γ(s)}`
/// over the disc of the largest radius, returned per arc sample.
///
/// For real `f` only the real part of the pullback is meaningful and the
/// imaginary parts are zero.
pub fn l6_with_pullback(f: &ArcFunction, ctrl: &L6Control) -> Result<(L6Result, Vec<Complex64>)> {
    ctrl.validate()?;
    let mut out = vec![Complex64::new(0.0, 0.0); f.len()];
    if f.is_zero() {
        return Ok((finish_l6([0.0; 3], ctrl, 0.0)?, out));
    }
    let prep = prepare(f, ctrl, true);
    let march = polar_march(&prep, ctrl, true);
    let result = finish_l6(march.partial, ctrl, prep.resolution)?;
    if let Some(adj) = march.adjoint {
        for (k, &i) in prep.index.iter().enumerate() {
            out[i] = if prep.real { Complex64::new(adj[k].re, 0.0) } else { adj[k] };
        }
    }
    Ok((result, out))
}

/// Rayleigh quotient `‖f̂σ‖₆ / ‖f‖_{L²(σ)}` with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rayleigh {
    pub value: f64,
    pub error_estimate: f64,
    pub l2: f64,
    pub l6: L6Result,
}

pub fn rayleigh(f: &ArcFunction, ctrl: &L6Control) -> Result<Rayleigh> {
    let l2 = f.l2_sigma_norm();
    if !(l2 > 0.0) {
        return invalid("the Rayleigh quotient of the zero function is undefined");
    }
    let l6 = l6_norm_direct(f, ctrl)?;
    Ok(Rayleigh { value: l6.value / l2, error_estimate: l6.error_estimate / l2, l2, l6 })
}

/// Convolution-route L⁶ norm with its two grid levels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvolutionL6 {
    /// Extrapolated `‖f̂σ‖₆`.
    pub value: f64,
    /// Norm implied by the coarse grid alone.
    pub coarse: f64,
    /// Norm implied by the fine grid alone.
    pub fine: f64,
}

/// `‖f̂σ‖₆ = (2π ‖fσ∗fσ∗fσ‖₂)^{1/3}` with the triple convolution built by deposition.
///
/// Deposition smooths the density over one cell, which biases its L² norm by
/// an amount linear in the cell size; the norm is computed on `cells` and
/// `2·cells` grids and extrapolated linearly to zero cell size.
pub fn l6_norm_convolution(f: &ArcFunction, ctrl: &crate::convolution::DepositionControl) -> Result<ConvolutionL6> {
    if !f.is_real() {
        return invalid("the convolution route requires a real density");
    }
    let abs = f.with_real_values(f.real_values().iter().map(|v| v.abs()).collect())?;
    if abs.is_zero() {
        return Ok(ConvolutionL6 { value: 0.0, coarse: 0.0, fine: 0.0 });
    }
    let coarse = crate::convolution::triple_convolution_density(&abs, ctrl)?;
    let fine_ctrl = crate::convolution::DepositionControl { cells: 2 * ctrl.cells, ..*ctrl };
    let fine = crate::convolution::triple_convolution_density(&abs, &fine_ctrl)?;
    let h = |d: &crate::convolution::DensityField| (d.grid.dx() * d.grid.dt()).sqrt();
    let (h1, h2) = (h(&coarse), h(&fine));
    let (l1, l2) = (coarse.lp_norm(2.0), fine.lp_norm(2.0));
    let extrapolated = (h1 * l2 - h2 * l1) / (h1 - h2);
    let norm = |l: f64| (2.0 * PI * l.max(0.0)).cbrt();
    Ok(ConvolutionL6 { value: norm(extrapolated), coarse: norm(l1), fine: norm(l2) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arc::{ConvexArc, CurveSpec};
    use crate::field::MeasureKind;
    use std::sync::Arc;

    fn approx(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn closed_forms_at_origin() {
        let g1 = gaussian_closed_form(GaussianKind::G1, 1.0, 0.0, 0.0);
        assert!(approx(g1, Complex64::new((2.0 * PI).sqrt(), 0.0), 1e-15));
        let g2 = gaussian_closed_form(GaussianKind::G2, 1.0, 0.0, 0.0);
        assert!(approx(g2, g1, 1e-15));
        for t in [-3.0, 0.0, 2.5] {
            assert_eq!(gaussian_closed_form(GaussianKind::Phi1, 1.3, 0.0, t).norm(), 0.0);
        }
    }

    #[test]
    fn time_derivative_identities() {
        let (lam, x, t, h) = (1.7, 0.8, 0.6, 1e-4);
        let g = |t| gaussian_closed_form(GaussianKind::G1, lam, x, t);
        let d1 = (g(t + h) - g(t - h)) / (2.0 * h);
        let d2 = (g(t + h) - 2.0 * g(t) + g(t - h)) / (h * h);
        let g2 = gaussian_closed_form(GaussianKind::G2, lam, x, t);
        let g3 = gaussian_closed_form(GaussianKind::G3, lam, x, t);
        assert!(approx(g2, Complex64::new(0.0, 2.0 / lam) * d1, 1e-7));
        assert!(approx(g3, -4.0 / (lam * lam) * d2, 1e-5));
    }

    #[test]
    fn gauss_poly_matches_named_forms() {
        let lam = 0.7;
        let c = odd_mode_constant(lam);
        for (x, t) in [(0.3, -1.2), (1.5, 0.4), (-2.0, 3.0)] {
            let g1 = gauss_poly_extension(&[Complex64::new(1.0, 0.0)], lam, x, t);
            assert!(approx(g1, gaussian_closed_form(GaussianKind::G1, lam, x, t), 1e-13));
            let p1 = gauss_poly_extension(&[Complex64::new(0.0, 0.0), Complex64::new(c, 0.0)], lam, x, t);
            assert!(approx(p1, gaussian_closed_form(GaussianKind::Phi1, lam, x, t), 1e-13));
        }
    }

    #[test]
    fn extension_matches_gaussian_on_parabola() {
        let arc = Arc::new(ConvexArc::build(&CurveSpec::Parabola { mu: 1.0, halfwidth: 8.0 }, 4001).unwrap());
        let f = ArcFunction::from_param_fn(arc, MeasureKind::Projection, |y| Complex64::new((-0.5 * y * y).exp(), 0.0))
            .unwrap();
        let grid = PlaneGrid::new(-1.0, 1.0, -1.0, 1.0, 3, 3).unwrap();
        let ext = extend(&f, &grid).unwrap();
        for k in 0..grid.len() {
            let (x, t) = grid.node(k);
            let want = gaussian_closed_form(GaussianKind::G1, 1.0, -x, t);
            assert!(approx(ext.field.values[k], want, 1e-10), "{x} {t}");
        }
    }

    #[test]
    fn foschi_constants() {
        assert!((foschi_constant(1.0) - 2.287_335_285).abs() < 1e-8);
        assert!((foschi_constant(64.0) / foschi_constant(1.0) - 0.5).abs() < 1e-15);
        assert!((foschi_constant(1.0).powi(6) - foschi_constant_sixth(1.0)).abs() < 1e-10);
    }
}
