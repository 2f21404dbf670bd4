//! Convolutions of weighted arc measures: deposited pair and triple densities,
//! the `L^{3/2}` norm of pair convolutions, the bilinear form `B_α`, cap
//! interactions, and the triple autoconvolution of a cap measure with its
//! small-cap limit.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::arc::{Cap, ConvexArc};
use crate::error::{invalid, numerical, Result};
use crate::field::{ArcFunction, MeasureKind, PlaneGrid};
use crate::par::map_indexed;
use crate::quadrature::{gauss_legendre, simpson_weights};

/// Resolution of deposited convolution densities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DepositionControl {
    /// Arclength-uniform resampling count per function.
    pub points: usize,
    /// Grid nodes per axis of the target box.
    pub cells: usize,
}

impl Default for DepositionControl {
    fn default() -> Self {
        DepositionControl { points: 400, cells: 128 }
    }
}

impl DepositionControl {
    pub fn validate(&self) -> Result<()> {
        if self.points < 8 || self.cells < 4 {
            return invalid("deposition needs at least 8 points and 4 cells");
        }
        Ok(())
    }
}

/// Point masses `(position, f·dσ)` on an arclength-uniform resampling of the
/// support of `f` (from the sample before its first non-zero value to the
/// sample after its last).
fn resample(f: &ArcFunction, m: usize) -> Vec<([f64; 2], f64)> {
    let arc = f.arc();
    let vals = f.values();
    let (Some(first), Some(last)) = (vals.iter().position(|v| v.re != 0.0), vals.iter().rposition(|v| v.re != 0.0))
    else {
        return Vec::new();
    };
    let lo = arc.s()[first.saturating_sub(1)];
    let hi = arc.s()[(last + 1).min(vals.len() - 1)];
    let h = (hi - lo) / (m - 1) as f64;
    let w = simpson_weights(m, h);
    (0..m)
        .map(|k| {
            let s = lo + k as f64 * h;
            let density = match f.measure() {
                MeasureKind::Arclength => 1.0,
                MeasureKind::Projection => arc.theta_at(s).cos(),
            };
            (arc.gamma_at(s), f.value_at(s).re * w[k] * density)
        })
        .filter(|(_, m)| *m != 0.0)
        .collect()
}

/// Bilinear (cloud-in-cell) deposit of `mass` at `(x, t)` onto grid nodes.
#[inline]
fn deposit(buf: &mut [f64], grid: &PlaneGrid, x: f64, t: f64, mass: f64) -> bool {
    let fx = (x - grid.x_min) / grid.dx();
    let ft = (t - grid.t_min) / grid.dt();
    if fx < 0.0 || ft < 0.0 || fx > (grid.nx - 1) as f64 || ft > (grid.nt - 1) as f64 {
        return false;
    }
    let i = (fx.floor() as usize).min(grid.nx - 2);
    let j = (ft.floor() as usize).min(grid.nt - 2);
    let (ax, at) = (fx - i as f64, ft - j as f64);
    let nt = grid.nt;
    buf[i * nt + j] += mass * (1.0 - ax) * (1.0 - at);
    buf[i * nt + j + 1] += mass * (1.0 - ax) * at;
    buf[(i + 1) * nt + j] += mass * ax * (1.0 - at);
    buf[(i + 1) * nt + j + 1] += mass * ax * at;
    true
}

/// Effective area of each node under bilinear deposition (half/quarter cells on the border).
fn node_area(grid: &PlaneGrid, i: usize, j: usize) -> f64 {
    let fx = if i == 0 || i == grid.nx - 1 { 0.5 } else { 1.0 };
    let ft = if j == 0 || j == grid.nt - 1 { 0.5 } else { 1.0 };
    fx * ft * grid.dx() * grid.dt()
}

/// A real density sampled on a plane grid (x-major).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityField {
    pub grid: PlaneGrid,
    pub values: Vec<f64>,
}

impl DensityField {
    /// `∫ ρ` by node-area quadrature.
    pub fn mass(&self) -> f64 {
        self.values.iter().enumerate().map(|(k, v)| v * node_area(&self.grid, k / self.grid.nt, k % self.grid.nt)).sum()
    }

    /// `(∫ |ρ|^p)^{1/p}`.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let s: f64 = self
            .values
            .iter()
            .enumerate()
            .map(|(k, v)| v.abs().powf(p) * node_area(&self.grid, k / self.grid.nt, k % self.grid.nt))
            .sum();
        s.powf(1.0 / p)
    }

    /// Rows `(x, t, value)`.
    pub fn to_rows(&self) -> Vec<[f64; 3]> {
        self.values
            .iter()
            .enumerate()
            .map(|(k, v)| {
                let (x, t) = self.grid.node(k);
                [x, t, *v]
            })
            .collect()
    }

    fn from_masses(grid: PlaneGrid, masses: Vec<f64>) -> Self {
        let values = masses
            .iter()
            .enumerate()
            .map(|(k, m)| m / node_area(&grid, k / grid.nt, k % grid.nt))
            .collect();
        DensityField { grid, values }
    }
}

fn bounding_box(points: &[([f64; 2], f64)]) -> [f64; 4] {
    let mut b = [f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY];
    for (p, _) in points {
        b[0] = b[0].min(p[0]);
        b[1] = b[1].max(p[0]);
        b[2] = b[2].min(p[1]);
        b[3] = b[3].max(p[1]);
    }
    b
}

const DEPOSIT_BLOCKS: usize = 16;

/// Deposits `Σ_{i,j} m_i n_j δ_{p_i + q_j}` (and a third factor when given) in
/// fixed-size blocks of the first index, summed in block order.
fn deposit_sums(
    grid: &PlaneGrid,
    a: &[([f64; 2], f64)],
    b: &[([f64; 2], f64)],
    c: Option<&[([f64; 2], f64)]>,
) -> Result<Vec<f64>> {
    let blocks = DEPOSIT_BLOCKS.min(a.len().max(1));
    let per = a.len().div_ceil(blocks);
    let parts = map_indexed(blocks, |blk| {
        let mut buf = vec![0.0; grid.len()];
        let mut missed = false;
        for (pa, ma) in a.iter().skip(blk * per).take(per) {
            for (pb, mb) in b {
                let (x, t, m) = (pa[0] + pb[0], pa[1] + pb[1], ma * mb);
                match c {
                    None => missed |= !deposit(&mut buf, grid, x, t, m),
                    Some(c) => {
                        for (pc, mc) in c {
                            missed |= !deposit(&mut buf, grid, x + pc[0], t + pc[1], m * mc);
                        }
                    }
                }
            }
        }
        (buf, missed)
    });
    let mut total = vec![0.0; grid.len()];
    for (buf, missed) in parts {
        if missed {
            return invalid("plane grid does not cover the support of the convolution");
        }
        for (t, v) in total.iter_mut().zip(buf) {
            *t += v;
        }
    }
    Ok(total)
}

/// Density of `fσ ∗ gσ` on `grid` by deposition over all ordered sample pairs.
///
/// Both branches `s > s′` and `s < s′` of the two-to-one sum map are covered
/// since every ordered pair deposits its own mass.
pub fn pair_convolution_density(
    f: &ArcFunction,
    g: &ArcFunction,
    grid: &PlaneGrid,
    ctrl: &DepositionControl,
) -> Result<DensityField> {
    grid.validate()?;
    ctrl.validate()?;
    f.check_compatible(g)?;
    if !f.is_real() || !g.is_real() {
        return invalid("convolution densities require real functions");
    }
    let a = resample(f, ctrl.points);
    let b = resample(g, ctrl.points);
    let masses = deposit_sums(grid, &a, &b, None)?;
    Ok(DensityField::from_masses(*grid, masses))
}

/// A node grid covering `k·Γ` (the `k`-fold sum set) with a one-cell margin.
pub fn covering_grid(points: &[([f64; 2], f64)], k: f64, cells: usize) -> Result<PlaneGrid> {
    let b = bounding_box(points);
    let (w, h) = ((b[1] - b[0]) * k, (b[3] - b[2]) * k);
    let pad_x = (w.max(h) * 1e-3).max(1e-12) + w / (cells - 3) as f64;
    let pad_t = (w.max(h) * 1e-3).max(1e-12) + h / (cells - 3) as f64;
    PlaneGrid::new(k * b[0] - pad_x, k * b[1] + pad_x, k * b[2] - pad_t, k * b[3] + pad_t, cells, cells)
}

/// Density of `fσ ∗ fσ ∗ fσ` on a grid covering `Γ + Γ + Γ`.
pub fn triple_convolution_density(f: &ArcFunction, ctrl: &DepositionControl) -> Result<DensityField> {
    triple_product_density(f, f, f, ctrl)
}

/// Density of `fσ ∗ gσ ∗ hσ` on a grid covering the sum of the three supports.
pub fn triple_product_density(
    f: &ArcFunction,
    g: &ArcFunction,
    h: &ArcFunction,
    ctrl: &DepositionControl,
) -> Result<DensityField> {
    ctrl.validate()?;
    f.check_compatible(g)?;
    f.check_compatible(h)?;
    if !f.is_real() || !g.is_real() || !h.is_real() {
        return invalid("convolution densities require real functions");
    }
    let (a, b, c) = (resample(f, ctrl.points), resample(g, ctrl.points), resample(h, ctrl.points));
    if a.is_empty() || b.is_empty() || c.is_empty() {
        let grid = PlaneGrid::square(1.0, ctrl.cells)?;
        return Ok(DensityField { grid, values: vec![0.0; grid.len()] });
    }
    let (ba, bb, bc) = (bounding_box(&a), bounding_box(&b), bounding_box(&c));
    let corners = [
        ([ba[0] + bb[0] + bc[0], ba[2] + bb[2] + bc[2]], 0.0),
        ([ba[1] + bb[1] + bc[1], ba[3] + bb[3] + bc[3]], 0.0),
    ];
    let grid = covering_grid(&corners, 1.0, ctrl.cells)?;
    let masses = deposit_sums(&grid, &a, &b, Some(&c))?;
    Ok(DensityField::from_masses(grid, masses))
}

/// `‖fσ ∗ fσ ∗ fσ‖_{L²}` of the deposited triple density.
pub fn triple_convolution_l2(f: &ArcFunction, ctrl: &DepositionControl) -> Result<f64> {
    Ok(triple_convolution_density(f, ctrl)?.lp_norm(2.0))
}

/// Density factor `dσ/ds` for the measure of `f`.
fn measure_factor(arc: &ConvexArc, measure: MeasureKind, s: f64) -> f64 {
    match measure {
        MeasureKind::Arclength => 1.0,
        MeasureKind::Projection => arc.theta_at(s).cos(),
    }
}

/// Gauss–Legendre order used on each smooth piece of the pair integral.
const PAIR_ORDER: usize = 12;
/// Uniform subdivisions of each smooth piece.
const PAIR_SUBDIV: usize = 4;

fn gl_pieces(breaks: &[f64], nodes: &[f64], weights: &[f64], mut f: impl FnMut(f64) -> f64) -> f64 {
    let mut acc = 0.0;
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let step = (b - a) / PAIR_SUBDIV as f64;
        for k in 0..PAIR_SUBDIV {
            let lo = a + k as f64 * step;
            let half = 0.5 * step;
            for (x, wq) in nodes.iter().zip(weights) {
                acc += half * wq * f(lo + half * (1.0 + x));
            }
        }
    }
    acc
}

fn sorted_breaks(mut v: Vec<f64>, lo: f64, hi: f64) -> Vec<f64> {
    v.retain(|x| *x > lo && *x < hi);
    v.push(lo);
    v.push(hi);
    v.sort_by(|a, b| a.total_cmp(b));
    v.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * (1.0 + b.abs()));
    v
}

/// `‖fσ ∗ gσ‖_{L^{3/2}}` for nonnegative densities given as functions of arclength.
///
/// Uses the injective branch `s > s′` of the sum map:
/// `∫∫_{s>s′} (f(s)g(s′) + f(s′)g(s))^{3/2} J^{−1/2}` with `J = |sin(θ(s) − θ(s′))|`.
/// The substitution `s = m + q²`, `s′ = m` turns the diagonal singularity into a
/// bounded integrand; `breaks` lists arclengths where `f` or `g` may jump.
pub fn l32_norm_pair_fn(
    arc: &ConvexArc,
    f: &dyn Fn(f64) -> f64,
    g: &dyn Fn(f64) -> f64,
    breaks: &[f64],
) -> f64 {
    let len = arc.length();
    let (nodes, weights) = gauss_legendre(PAIR_ORDER);
    let pts = sorted_breaks(breaks.to_vec(), 0.0, len);
    let mut q_breaks = Vec::new();
    for &a in &pts {
        for &b in &pts {
            if a > b {
                q_breaks.push((a - b).sqrt());
            }
        }
    }
    let q_breaks = sorted_breaks(q_breaks, 0.0, len.sqrt());
    let inner = |q: f64| {
        let q2 = q * q;
        let hi = len - q2;
        if hi <= 0.0 {
            return 0.0;
        }
        let mut mb: Vec<f64> = pts.clone();
        mb.extend(pts.iter().map(|b| b - q2));
        let mb = sorted_breaks(mb, 0.0, hi);
        gl_pieces(&mb, &nodes, &weights, |m| {
            let (s, sp) = (m + q2, m);
            let n = f(s) * g(sp) + f(sp) * g(s);
            if n <= 0.0 {
                return 0.0;
            }
            let j = (arc.theta_at(s) - arc.theta_at(sp)).sin().abs();
            let ratio = if j > 0.0 { q2 / j } else { 1.0 / arc.kappa_at(m) };
            2.0 * n.powf(1.5) * ratio.sqrt()
        })
    };
    let total = gl_pieces(&q_breaks, &nodes, &weights, inner);
    total.max(0.0).powf(2.0 / 3.0)
}

/// `‖fσ ∗ gσ‖_{L^{3/2}}` for nonnegative sampled densities.
///
/// Samples are linearly interpolated; the ends of each support are treated as
/// break points.
pub fn l32_norm_pair(f: &ArcFunction, g: &ArcFunction) -> Result<f64> {
    f.check_compatible(g)?;
    if !f.is_nonnegative() || !g.is_nonnegative() {
        return invalid("the pair L^{3/2} norm requires nonnegative densities");
    }
    if f.is_zero() || g.is_zero() {
        return Ok(0.0);
    }
    let arc = f.arc();
    let mut breaks = Vec::new();
    for h in [f, g] {
        let v = h.values();
        for i in 0..v.len() - 1 {
            if (v[i].re == 0.0) != (v[i + 1].re == 0.0) {
                breaks.push(arc.s()[if v[i].re == 0.0 { i } else { i + 1 }]);
            }
        }
    }
    let measure = f.measure();
    let fe = |s: f64| f.value_at(s).re * measure_factor(arc, measure, s);
    let ge = |s: f64| g.value_at(s).re * measure_factor(arc, measure, s);
    Ok(l32_norm_pair_fn(arc, &fe, &ge, &breaks))
}

/// `‖χ_C σ ∗ χ_{C′} σ‖_{L^{3/2}}` for two caps (arclength measure).
pub fn cap_interaction(arc: &ConvexArc, c1: &Cap, c2: &Cap) -> Result<f64> {
    let len = arc.length();
    let (a1, b1) = c1.clipped(len).ok_or_else(|| crate::Error::InvalidInput("first cap misses the arc".into()))?;
    let (a2, b2) = c2.clipped(len).ok_or_else(|| crate::Error::InvalidInput("second cap misses the arc".into()))?;
    let f = move |s: f64| if s > a1 && s < b1 { 1.0 } else { 0.0 };
    let g = move |s: f64| if s > a2 && s < b2 { 1.0 } else { 0.0 };
    Ok(l32_norm_pair_fn(arc, &f, &g, &[a1, b1, a2, b2]))
}

/// `σ`-measure of a cap clipped to the arc.
pub fn cap_measure(arc: &ConvexArc, cap: &Cap) -> f64 {
    cap.clipped(arc.length()).map(|(a, b)| b - a).unwrap_or(0.0)
}

/// `B_α(F, G) = ∫∫ F(x) G(x′) |x − x′|^{−α}` for piecewise-linear interpolants
/// of samples on a common uniform grid (zero outside the sampled range).
///
/// Integrates exactly: the second distributional derivatives of the
/// interpolants are point masses and end dipoles, paired against the fourth
/// antiderivative of the kernel.
pub fn bilinear_form(f: &[f64], g: &[f64], h: f64, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return invalid(format!("alpha must lie in (0, 1), got {alpha}"));
    }
    if f.len() != g.len() || f.len() < 2 {
        return invalid("bilinear form needs two sample vectors of equal length >= 2");
    }
    if !(h > 0.0) {
        return invalid("grid step must be positive");
    }
    let c2 = (1.0 - alpha) * (2.0 - alpha);
    let c3 = c2 * (3.0 - alpha);
    let c4 = c3 * (4.0 - alpha);
    let k2 = |z: f64| z.abs().powf(2.0 - alpha) / c2;
    let k3 = |z: f64| z.signum() * z.abs().powf(3.0 - alpha) / c3;
    let k4 = |z: f64| z.abs().powf(4.0 - alpha) / c4;
    // Point masses and dipoles of the second derivative.
    let singular = |v: &[f64]| -> (Vec<f64>, Vec<f64>) {
        let n = v.len();
        let slope = |i: isize| if i < 0 || i as usize >= n - 1 { 0.0 } else { (v[i as usize + 1] - v[i as usize]) / h };
        let a: Vec<f64> = (0..n as isize).map(|i| slope(i) - slope(i - 1)).collect();
        let mut b = vec![0.0; n];
        b[0] = v[0];
        b[n - 1] -= v[n - 1];
        (a, b)
    };
    let (af, bf) = singular(f);
    let (ag, bg) = singular(g);
    let n = f.len();
    let rows = map_indexed(n, |i| {
        let mut acc = 0.0;
        for j in 0..n {
            let z = (i as f64 - j as f64) * h;
            acc += af[i] * ag[j] * k4(z) - bf[i] * ag[j] * k3(z) + af[i] * bg[j] * k3(z) - bf[i] * bg[j] * k2(z);
        }
        acc
    });
    Ok(rows.iter().sum())
}

/// Local graph of an arc near a point: the arc rotated so that the tangent at
/// the point is horizontal, tabulated as `y ↦ (g, g′, g″)` on a uniform grid.
struct LocalGraph {
    y0: f64,
    dy: f64,
    g: Vec<f64>,
    g1: Vec<f64>,
    g2: Vec<f64>,
}

impl LocalGraph {
    fn build(arc: &ConvexArc, s_center: f64, s_lo: f64, s_hi: f64, m: usize) -> Result<(Self, f64, f64)> {
        let th_c = arc.theta_at(s_center);
        let p0 = arc.gamma_at(s_center);
        let (c, s) = (th_c.cos(), th_c.sin());
        let local = |sv: f64| {
            let p = arc.gamma_at(sv);
            let (dx, dy) = (p[0] - p0[0], p[1] - p0[1]);
            (c * dx + s * dy, -s * dx + c * dy)
        };
        if (arc.theta_at(s_lo) - th_c).abs() >= 0.5 * PI || (arc.theta_at(s_hi) - th_c).abs() >= 0.5 * PI {
            return invalid("cap too large for a local graph description");
        }
        let (ylo, _) = local(s_lo);
        let (yhi, _) = local(s_hi);
        let dy = (yhi - ylo) / (m - 1) as f64;
        let mut g = Vec::with_capacity(m);
        let mut g1 = Vec::with_capacity(m);
        let mut g2 = Vec::with_capacity(m);
        let mut sv = s_lo;
        for k in 0..m {
            let y = ylo + k as f64 * dy;
            for _ in 0..30 {
                let (yy, _) = local(sv);
                let d = (arc.theta_at(sv) - th_c).cos();
                let step = (yy - y) / d;
                sv = (sv - step).clamp(s_lo, s_hi);
                if step.abs() < 1e-15 {
                    break;
                }
            }
            let (_, gv) = local(sv);
            let phi = arc.theta_at(sv) - th_c;
            g.push(gv);
            g1.push(phi.tan());
            g2.push(arc.kappa_at(sv) / phi.cos().powi(3));
        }
        Ok((LocalGraph { y0: ylo, dy, g, g1, g2 }, ylo, yhi))
    }

    fn y_max(&self) -> f64 {
        self.y0 + self.dy * (self.g.len() - 1) as f64
    }

    /// Quintic Hermite interpolation of `(g, g′)` at `y`.
    fn eval(&self, y: f64) -> (f64, f64) {
        let n = self.g.len();
        let u = ((y - self.y0) / self.dy).clamp(0.0, (n - 1) as f64);
        let k = (u.floor() as usize).min(n - 2);
        let t = u - k as f64;
        let h = self.dy;
        let (p0, p1) = (self.g[k], self.g[k + 1]);
        let (d0, d1) = (self.g1[k] * h, self.g1[k + 1] * h);
        let (s0, s1) = (self.g2[k] * h * h, self.g2[k + 1] * h * h);
        let t2 = t * t;
        let t3 = t2 * t;
        let t4 = t3 * t;
        let t5 = t4 * t;
        let h00 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
        let h10 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
        let h20 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
        let h01 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
        let h11 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
        let h21 = 0.5 * (t3 - 2.0 * t4 + t5);
        let v = h00 * p0 + h10 * d0 + h20 * s0 + h01 * p1 + h11 * d1 + h21 * s1;
        let dh00 = -30.0 * t2 + 60.0 * t3 - 30.0 * t4;
        let dh10 = 1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4;
        let dh20 = 0.5 * (2.0 * t - 9.0 * t2 + 12.0 * t3 - 5.0 * t4);
        let dh01 = 30.0 * t2 - 60.0 * t3 + 30.0 * t4;
        let dh11 = -12.0 * t2 + 28.0 * t3 - 15.0 * t4;
        let dh21 = 0.5 * (3.0 * t2 - 8.0 * t3 + 5.0 * t4);
        let d = (dh00 * p0 + dh10 * d0 + dh20 * s0 + dh01 * p1 + dh11 * d1 + dh21 * s1) / h;
        (v, d)
    }

    fn second(&self, y: f64) -> f64 {
        let n = self.g.len();
        let u = ((y - self.y0) / self.dy).clamp(0.0, (n - 1) as f64);
        let k = (u.floor() as usize).min(n - 2);
        let t = u - k as f64;
        self.g2[k] * (1.0 - t) + self.g2[k + 1] * t
    }
}

/// Number of angular nodes in the triple-density integral.
pub const TRIPLE_ANGLES: usize = 64;

/// Triple autoconvolution `σ_C ∗ σ_C ∗ σ_C` of the arclength measure on a cap.
///
/// Evaluated in local graph coordinates centred at the cap centre, where
/// `(ξ, τ)` is the position relative to three times the centre. The integral
/// over the plane `Σ η_k = 0` is written in polar coordinates `(ρ, ϑ)`; for each
/// of [`TRIPLE_ANGLES`] angles, `ψ(ρ) = u` is solved by safeguarded Newton.
pub struct TripleDensity {
    graph: LocalGraph,
    y_lo: f64,
    y_hi: f64,
    basis: [[f64; 3]; TRIPLE_ANGLES],
}

impl TripleDensity {
    pub fn new(arc: &ConvexArc, cap: &Cap) -> Result<Self> {
        let len = arc.length();
        let (a, b) = cap.clipped(len).ok_or_else(|| crate::Error::InvalidInput("cap misses the arc".into()))?;
        let ext = 0.5 * (b - a);
        let (sa, sb) = ((a - ext).max(0.0), (b + ext).min(len));
        let (graph, table_lo, table_hi) = LocalGraph::build(arc, cap.center, sa, sb, 2001)?;
        let _ = (table_lo, table_hi);
        let to_y = |s: f64| {
            let th_c = arc.theta_at(cap.center);
            let p0 = arc.gamma_at(cap.center);
            let p = arc.gamma_at(s);
            th_c.cos() * (p[0] - p0[0]) + th_c.sin() * (p[1] - p0[1])
        };
        let (y_lo, y_hi) = (to_y(a), to_y(b));
        let r2 = 0.5f64.sqrt();
        let r6 = 6f64.sqrt().recip();
        let mut basis = [[0.0; 3]; TRIPLE_ANGLES];
        for (k, e) in basis.iter_mut().enumerate() {
            let th = 2.0 * PI * k as f64 / TRIPLE_ANGLES as f64;
            let (c, s) = (th.cos(), th.sin());
            *e = [c * r2 + s * r6, -c * r2 + s * r6, -2.0 * s * r6];
        }
        Ok(TripleDensity { graph, y_lo, y_hi, basis })
    }

    /// Local-graph range `[y_lo, y_hi]` of the cap.
    pub fn cap_range(&self) -> (f64, f64) {
        (self.y_lo, self.y_hi)
    }

    /// Lower boundary `τ = 3g(ξ/3)` of the support at `ξ`.
    pub fn lower_boundary(&self, xi: f64) -> f64 {
        3.0 * self.graph.eval(xi / 3.0).0
    }

    /// Largest `g″` over the cap.
    pub fn max_curvature(&self) -> f64 {
        let mut m: f64 = 0.0;
        for (k, v) in self.graph.g2.iter().enumerate() {
            let y = self.graph.y0 + k as f64 * self.graph.dy;
            if y >= self.y_lo && y <= self.y_hi {
                m = m.max(*v);
            }
        }
        m
    }

    fn inside(&self, y: f64) -> bool {
        y >= self.y_lo && y <= self.y_hi
    }

    fn weight(&self, y: f64) -> f64 {
        let (_, d) = self.graph.eval(y);
        (1.0 + d * d).sqrt()
    }

    /// Density at `(ξ, τ)`; zero outside the support.
    pub fn density(&self, xi: f64, tau: f64) -> Result<f64> {
        let c = xi / 3.0;
        if !self.inside(c) {
            return Ok(0.0);
        }
        let (g0, _) = self.graph.eval(c);
        let gpp = self.graph.second(c);
        let mut u = tau - 3.0 * g0;
        let tol = 1e-13 * (g0.abs() + gpp * (self.y_hi - self.y_lo).powi(2));
        if u.abs() <= tol {
            u = 0.0;
        }
        if u < 0.0 {
            return Ok(0.0);
        }
        if u == 0.0 {
            return Ok(2.0 * PI / 3f64.sqrt() * self.weight(c).powi(3) / gpp);
        }
        let (lo, hi) = (self.graph.y0, self.graph.y_max());
        let mut acc = 0.0;
        for e in &self.basis {
            // Largest ρ keeping all three points inside the table.
            let mut rho_max = f64::INFINITY;
            for &ek in e {
                if ek > 0.0 {
                    rho_max = rho_max.min((hi - c) / ek);
                } else if ek < 0.0 {
                    rho_max = rho_max.min((lo - c) / ek);
                }
            }
            let psi = |rho: f64| -> (f64, f64) {
                let mut v = -3.0 * g0;
                let mut d = 0.0;
                for &ek in e {
                    let (gv, g1) = self.graph.eval(c + rho * ek);
                    v += gv;
                    d += g1 * ek;
                }
                (v, d)
            };
            if psi(rho_max).0 < u {
                continue;
            }
            let (mut a, mut b) = (0.0, rho_max);
            let mut rho = (2.0 * u / gpp).sqrt().min(rho_max);
            let mut converged = false;
            for _ in 0..50 {
                let (v, d) = psi(rho);
                let r = v - u;
                if r > 0.0 {
                    b = rho;
                } else {
                    a = rho;
                }
                if r.abs() <= 1e-14 * (1.0 + u.abs()) + 1e-300 {
                    converged = true;
                    break;
                }
                let mut next = if d > 0.0 { rho - r / d } else { f64::NAN };
                if !(next > a && next < b) {
                    next = 0.5 * (a + b);
                }
                if (next - rho).abs() <= 1e-15 * rho.max(1e-300) {
                    rho = next;
                    converged = true;
                    break;
                }
                rho = next;
            }
            if !converged {
                return numerical(format!("triple density root not found at xi={xi}, tau={tau}"));
            }
            let ys = [c + rho * e[0], c + rho * e[1], c + rho * e[2]];
            if !ys.iter().all(|y| self.inside(*y)) {
                continue;
            }
            let (_, d) = psi(rho);
            let w: f64 = ys.iter().map(|y| self.weight(*y)).product();
            acc += rho * w / d;
        }
        Ok(acc * 2.0 * PI / TRIPLE_ANGLES as f64 / 3f64.sqrt())
    }

    /// Sup of the density over a probe grid of the support: `ξ/3` across the
    /// cap and `u = τ − 3g(ξ/3)` quadratically clustered towards `u = 0`.
    pub fn sup_on_probes(&self, n_xi: usize, n_u: usize) -> Result<(f64, f64, f64)> {
        let (lo, hi) = (self.y_lo, self.y_hi);
        let width = hi - lo;
        let umax = self.max_curvature() * width * width;
        let probes: Vec<(f64, f64)> = (0..n_xi)
            .flat_map(|i| {
                let c = lo + width * i as f64 / (n_xi - 1) as f64;
                (0..n_u).map(move |j| {
                    let z = j as f64 / (n_u - 1) as f64;
                    (3.0 * c, z * z * umax)
                })
            })
            .collect();
        let vals = map_indexed(probes.len(), |k| {
            let (xi, u) = probes[k];
            let tau = self.lower_boundary(xi) + u;
            self.density(xi, tau).map(|v| (v, xi, tau))
        });
        let mut best = (0.0, 0.0, 0.0);
        for v in vals {
            let v = v?;
            if v.0 > best.0 {
                best = v;
            }
        }
        Ok(best)
    }
}

/// Pointwise triple autoconvolution density of a cap measure; see [`TripleDensity`].
pub fn triple_autoconv_density(arc: &ConvexArc, cap: &Cap, xi: f64, tau: f64) -> Result<f64> {
    TripleDensity::new(arc, cap)?.density(xi, tau)
}

/// One radius of a small-cap sup sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupRow {
    pub radius: f64,
    pub sup: f64,
    pub xi: f64,
    pub tau: f64,
    /// `((2π)² · sup)^{1/6}`.
    pub implied_norm: f64,
}

/// Small-cap limit of `‖σ_C ∗ σ_C ∗ σ_C‖_∞`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupLimit {
    pub rows: Vec<SupRow>,
    /// Intercept at `r = 0` of the least-squares line through `(r, sup)`.
    pub limit: f64,
    pub implied_norm: f64,
    /// Set when the sups do not decrease monotonically towards `r = 0`.
    pub non_monotone: bool,
}

/// Sup of the triple autoconvolution over shrinking caps centred at `s`,
/// extrapolated linearly in the radius to `r = 0`.
pub fn triple_autoconv_sup_limit(arc: &ConvexArc, s: f64, radii: &[f64]) -> Result<SupLimit> {
    if radii.len() < 3 {
        return invalid("at least three radii are required");
    }
    if radii.windows(2).any(|w| w[1] >= w[0]) || radii.iter().any(|r| !(*r > 0.0)) {
        return invalid("radii must be positive and strictly decreasing");
    }
    if !(s > 0.0 && s < arc.length()) {
        return invalid("cap centre must lie inside the arc");
    }
    let mut rows = Vec::new();
    for &r in radii {
        if s - 2.0 * r < 0.0 || s + 2.0 * r > arc.length() {
            return invalid(format!("cap of radius {r} around {s} leaves the arc"));
        }
        let td = TripleDensity::new(arc, &Cap::new(s, r)?)?;
        let (sup, xi, tau) = td.sup_on_probes(41, 41)?;
        rows.push(SupRow { radius: r, sup, xi, tau, implied_norm: ((2.0 * PI).powi(2) * sup).powf(1.0 / 6.0) });
    }
    let n = rows.len() as f64;
    let mx = rows.iter().map(|r| r.radius).sum::<f64>() / n;
    let my = rows.iter().map(|r| r.sup).sum::<f64>() / n;
    let sxy: f64 = rows.iter().map(|r| (r.radius - mx) * (r.sup - my)).sum();
    let sxx: f64 = rows.iter().map(|r| (r.radius - mx).powi(2)).sum();
    let limit = my - sxy / sxx * mx;
    let non_monotone = rows.windows(2).any(|w| w[1].sup > w[0].sup * (1.0 + 1e-9));
    Ok(SupLimit { rows, limit, implied_norm: ((2.0 * PI).powi(2) * limit).powf(1.0 / 6.0), non_monotone })
}
