//! Convolution densities of arc measures, the pair L^{3/2} norm, the exact
//! bilinear form and the pointwise triple autoconvolution.

use std::f64::consts::PI;
use std::sync::Arc;

use curvext::convolution::{
    bilinear_form, cap_interaction, cap_measure, pair_convolution_density, triple_autoconv_density,
    triple_autoconv_sup_limit, triple_product_density, DepositionControl, TripleDensity,
};
use curvext::quadrature::integrate_adaptive;
use curvext::variational::PerturbedParabola;
use curvext::{ArcFunction, Cap, ConvexArc, CurveSpec, FunctionSpec, MeasureKind, PlaneGrid};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn circle(radius: f64, extent: f64, n: usize) -> Arc<ConvexArc> {
    Arc::new(ConvexArc::build(&CurveSpec::Circle { radius, extent }, n).unwrap())
}

fn bump(arc: &Arc<ConvexArc>, center: f64, halfwidth: f64) -> ArcFunction {
    FunctionSpec::Bump { center, halfwidth, amplitude: 1.0 }.build(arc.clone(), MeasureKind::Arclength).unwrap()
}

/// Grid covering all sums of points on the two arclength ranges of the unit-radius arc.
fn covering(arc: &ConvexArc, r1: (f64, f64), r2: (f64, f64), n: usize) -> PlaneGrid {
    let mut b = [f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY];
    for i in 0..=200 {
        for j in 0..=200 {
            let p = arc.gamma_at(r1.0 + (r1.1 - r1.0) * i as f64 / 200.0);
            let q = arc.gamma_at(r2.0 + (r2.1 - r2.0) * j as f64 / 200.0);
            b[0] = b[0].min(p[0] + q[0]);
            b[1] = b[1].max(p[0] + q[0]);
            b[2] = b[2].min(p[1] + q[1]);
            b[3] = b[3].max(p[1] + q[1]);
        }
    }
    let (px, pt) = (0.05 * (b[1] - b[0]), 0.05 * (b[3] - b[2]));
    PlaneGrid::new(b[0] - px, b[1] + px, b[2] - pt, b[3] + pt, n, n).unwrap()
}

#[test]
fn bilinear_form_of_unit_indicators() {
    let ones = vec![1.0; 65];
    let v = bilinear_form(&ones, &ones, 1.0 / 64.0, 0.5).unwrap();
    assert!((v - 8.0 / 3.0).abs() < 1e-10, "{v}");
    assert_eq!(bilinear_form(&ones, &vec![0.0; 65], 1.0 / 64.0, 0.5).unwrap(), 0.0);
    assert!(bilinear_form(&ones, &ones, 0.1, 1.0).is_err());
}

#[test]
fn bilinear_form_matches_a_direct_double_integral() {
    let h = 0.1;
    let f: Vec<f64> = (0..11).map(|k| (k as f64 * h).sin()).collect();
    let g: Vec<f64> = (0..11).map(|k| 1.0 + k as f64 * h).collect();
    // Oracle: the same piecewise-linear interpolants integrated adaptively.
    let interp = |v: &[f64], x: f64| {
        let k = ((x / h).floor() as usize).min(v.len() - 2);
        let t = x / h - k as f64;
        v[k] * (1.0 - t) + v[k + 1] * t
    };
    // |x − y| = w^{1/0.7} turns |x − y|^{−0.3} dy into dw/0.7.
    let side = |x: f64, dir: f64, reach: f64| {
        if reach <= 0.0 {
            return 0.0;
        }
        let q = |w: f64| interp(&g, x + dir * w.powf(1.0 / 0.7)) / 0.7;
        integrate_adaptive(q, 0.0, reach.powf(0.7), 1e-14, 1e-13, 4000).unwrap().value
    };
    let inner = |x: f64| interp(&f, x) * (side(x, -1.0, x) + side(x, 1.0, 1.0 - x));
    let breaks: Vec<f64> = (0..=10).map(|k| k as f64 * h).collect();
    let oracle: f64 = breaks
        .windows(2)
        .map(|w| integrate_adaptive(inner, w[0], w[1], 1e-12, 1e-11, 4000).unwrap().value)
        .sum();
    let exact = bilinear_form(&f, &g, h, 0.3).unwrap();
    assert!((exact - oracle).abs() < 1e-8 * oracle.abs(), "{exact} {oracle}");
}

#[test]
fn pair_density_conserves_mass_and_is_nonnegative() {
    let arc = circle(1.0, 2.0, 1001);
    let f = bump(&arc, 1.5, 0.3);
    let g = bump(&arc, 0.6, 0.4);
    let grid = covering(&arc, (1.2, 1.8), (0.2, 1.0), 129);
    let d = pair_convolution_density(&f, &g, &grid, &DepositionControl::default()).unwrap();
    let want = f.integral().re * g.integral().re;
    assert!((d.mass() / want - 1.0).abs() < 0.01, "{} {want}", d.mass());
    assert!(d.values.iter().all(|v| *v >= 0.0));
    let swapped = pair_convolution_density(&g, &f, &grid, &DepositionControl::default()).unwrap();
    for (a, b) in d.values.iter().zip(&swapped.values) {
        assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
    }
    let zero = ArcFunction::zeros(arc, MeasureKind::Arclength).unwrap();
    let z = pair_convolution_density(&f, &zero, &grid, &DepositionControl::default()).unwrap();
    assert!(z.values.iter().all(|v| *v == 0.0));
}

#[test]
fn pair_density_matches_the_change_of_variables() {
    let arc = circle(1.0, 2.0, 2001);
    let f = bump(&arc, 1.5, 0.3);
    let g = bump(&arc, 0.5, 0.3);
    let grid = covering(&arc, (1.2, 1.8), (0.2, 0.8), 161);
    let d = pair_convolution_density(&f, &g, &grid, &DepositionControl { points: 1600, cells: 128 }).unwrap();
    // On the unit circle γ(s) + γ(s′) = 2cos δ (sin m, ·) with m the mean and δ the half difference.
    let analytic = |x: f64, t: f64| {
        let (a, b) = (x / 2.0, 1.0 - t / 2.0);
        let m = a.atan2(b);
        let delta = (a * a + b * b).sqrt().min(1.0).acos();
        let (s, sp) = (m + delta, m - delta);
        f.value_at(s).re * g.value_at(sp).re / (2.0 * delta).sin().abs()
    };
    let mut checked = 0;
    for (sv, spv) in [(1.5, 0.5), (1.4, 0.6), (1.6, 0.45)] {
        let p = arc.gamma_at(sv);
        let q = arc.gamma_at(spv);
        let (x, t) = (p[0] + q[0], p[1] + q[1]);
        let i = ((x - grid.x_min) / grid.dx()).round() as usize;
        let j = ((t - grid.t_min) / grid.dt()).round() as usize;
        let (xn, tn) = (grid.x(i), grid.t(j));
        let want = analytic(xn, tn);
        let got = d.values[i * grid.nt + j];
        assert!((got / want - 1.0).abs() < 0.02, "({xn}, {tn}): {got} vs {want}");
        checked += 1;
    }
    assert_eq!(checked, 3);
}

fn separated_oracle(a: (f64, f64), b: (f64, f64)) -> f64 {
    let inner = |s: f64| {
        integrate_adaptive(|sp| (s - sp).sin().abs().powf(-0.5), b.0, b.1, 1e-14, 1e-12, 2000).unwrap().value
    };
    integrate_adaptive(inner, a.0, a.1, 1e-13, 1e-12, 2000).unwrap().value.powf(2.0 / 3.0)
}

#[test]
fn cap_interaction_matches_adaptive_quadrature() {
    let arc = circle(1.0, 2.0, 1001);
    let got = cap_interaction(&arc, &Cap::new(1.2, 0.2).unwrap(), &Cap::new(0.35, 0.15).unwrap()).unwrap();
    let want = separated_oracle((1.0, 1.4), (0.2, 0.5));
    assert!((got / want - 1.0).abs() < 1e-8, "{got} {want}");

    // Identical caps: ∫∫_{s>s′} 2^{3/2} |sin(s − s′)|^{−1/2}.
    let (lo, hi) = (0.6, 0.7);
    let inner = |s: f64| {
        integrate_adaptive(|u: f64| u.sin().powf(-0.5), 0.0, s - lo, 1e-14, 1e-12, 4000).unwrap().value
    };
    let want = (2f64.powf(1.5) * integrate_adaptive(inner, lo, hi, 1e-14, 1e-12, 4000).unwrap().value).powf(2.0 / 3.0);
    let cap = Cap::new(0.65, 0.05).unwrap();
    let got = cap_interaction(&arc, &cap, &cap).unwrap();
    assert!((got / want - 1.0).abs() < 1e-8, "{got} {want}");
}

#[test]
fn cap_interaction_grows_with_the_caps() {
    let arc = circle(1.0, 2.0, 1001);
    let c = Cap::new(0.5, 0.1).unwrap();
    let mut last = 0.0;
    for r in [0.05, 0.1, 0.2, 0.4] {
        let v = cap_interaction(&arc, &c, &Cap::new(1.2, r).unwrap()).unwrap();
        assert!(v > last);
        last = v;
    }
}

#[test]
fn normalized_interaction_envelope_on_a_lattice() {
    let arc = circle(1.0, 2.5, 1001);
    let mut worst: f64 = 0.0;
    let radii = [0.02, 0.05, 0.1, 0.2, 0.4];
    let centers = [0.45, 0.8, 1.25, 1.7, 2.05];
    let mut count = 0;
    for (i, &r1) in radii.iter().enumerate() {
        for &r2 in &radii[i..] {
            for &c2 in &centers[..3] {
                let a = Cap::new(0.45, r1).unwrap();
                let b = Cap::new(c2, r2).unwrap();
                let v = cap_interaction(&arc, &a, &b).unwrap();
                worst = worst.max(v / (cap_measure(&arc, &a) * cap_measure(&arc, &b)).sqrt());
                count += 1;
            }
        }
    }
    for &c in &centers[3..] {
        let a = Cap::new(0.45, 0.1).unwrap();
        let b = Cap::new(c, 0.1).unwrap();
        let v = cap_interaction(&arc, &a, &b).unwrap();
        worst = worst.max(v / (cap_measure(&arc, &a) * cap_measure(&arc, &b)).sqrt());
        count += 1;
    }
    for r in [0.03, 0.07, 0.15] {
        let a = Cap::new(1.25, r).unwrap();
        let v = cap_interaction(&arc, &a, &a).unwrap();
        worst = worst.max(v / cap_measure(&arc, &a));
        count += 1;
    }
    assert_eq!(count, 50);
    assert!(worst <= ENVELOPE, "{worst}");
}

/// Largest normalized interaction over the lattice above, recorded on the first run.
const ENVELOPE: f64 = 2.430_334_3;

#[test]
fn triple_density_at_the_vertex_of_its_support() {
    let unit = circle(1.0, 2.0, 2001);
    let v = triple_autoconv_density(&unit, &Cap::new(1.0, 0.1).unwrap(), 0.0, 0.0).unwrap();
    assert!((v / (2.0 * PI / 3f64.sqrt()) - 1.0).abs() < 0.01, "{v}");
    let half = circle(0.5, 2.0, 2001);
    let v = triple_autoconv_density(&half, &Cap::new(0.5, 0.1).unwrap(), 0.0, 0.0).unwrap();
    assert!((v / (PI / 3f64.sqrt()) - 1.0).abs() < 0.01, "{v}");
    let outside = triple_autoconv_density(&unit, &Cap::new(1.0, 0.1).unwrap(), 0.0, -0.01).unwrap();
    assert_eq!(outside, 0.0);
}

#[test]
fn triple_density_is_continuous_inside_its_support() {
    let arc = circle(1.0, 2.0, 2001);
    let td = TripleDensity::new(&arc, &Cap::new(1.0, 0.1).unwrap()).unwrap();
    // Away from the outer edge of the support, where the density drops sharply.
    let jump = |n: usize| {
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let xi = -0.06 + 0.12 * i as f64 / (n - 1) as f64;
            let mut prev: Option<f64> = None;
            for j in 0..n {
                let tau = td.lower_boundary(xi) + 5e-4 + 2.5e-3 * j as f64 / (n - 1) as f64;
                let v = td.density(xi, tau).unwrap();
                if let Some(p) = prev {
                    worst = worst.max((v - p).abs());
                }
                prev = Some(v);
            }
        }
        worst
    };
    let (coarse, fine) = (jump(11), jump(41));
    assert!(fine < 0.5 * coarse, "{coarse} {fine}");
}

#[test]
fn triple_density_matches_monte_carlo_binning() {
    let arc = circle(1.0, 2.0, 2001);
    let cap = Cap::new(1.0, 0.1).unwrap();
    let td = TripleDensity::new(&arc, &cap).unwrap();
    let xi0 = 0.03;
    let tau0 = td.lower_boundary(xi0) + 0.003;
    let (dxi, dtau) = (0.004, 0.0006);
    let want = td.density(xi0, tau0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let n: u64 = 100_000_000;
    let mut hits = 0u64;
    for _ in 0..n {
        let (a, b, c): (f64, f64, f64) =
            (rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1));
        let xi = a.sin() + b.sin() + c.sin();
        if (xi - xi0).abs() >= dxi {
            continue;
        }
        let tau = 3.0 - a.cos() - b.cos() - c.cos();
        if (tau - tau0).abs() < dtau {
            hits += 1;
        }
    }
    let area = 4.0 * dxi * dtau;
    let total = 0.2f64.powi(3);
    let estimate = total * hits as f64 / n as f64 / area;
    let sigma = estimate / (hits as f64).sqrt();
    assert!((estimate - want).abs() < 3.0 * sigma, "{estimate} +- {sigma} vs {want}");
}

#[test]
fn small_cap_limit_depends_only_on_curvature() {
    let unit = circle(1.0, 2.0, 4001);
    let a = triple_autoconv_sup_limit(&unit, 1.0, &[0.2, 0.1, 0.05]).unwrap();
    let pp = PerturbedParabola::new(1.0, 0.17, 0.76).unwrap();
    let graph = Arc::new(ConvexArc::build(&pp.spec(), 4001).unwrap());
    let b = triple_autoconv_sup_limit(&graph, graph.length() / 2.0, &[0.2, 0.1, 0.05]).unwrap();
    assert!((b.limit / a.limit - 1.0).abs() < 0.02, "{} {}", a.limit, b.limit);
    assert!(triple_autoconv_sup_limit(&unit, 1.0, &[0.1, 0.2, 0.05]).is_err());
    assert!(triple_autoconv_sup_limit(&unit, 1.0, &[0.2, 0.1]).is_err());
}

#[test]
fn trilinear_interaction_decays_with_separation() {
    let arc = circle(1.0, 2.4, 2001);
    let ctrl = DepositionControl { points: 200, cells: 128 };
    let indicator = |c: f64| {
        FunctionSpec::CapIndicator { center: c, radius: 0.05, amplitude: 1.0 }
            .build(arc.clone(), MeasureKind::Arclength)
            .unwrap()
    };
    let (f, g) = (indicator(0.2), indicator(0.35));
    let mut values = Vec::new();
    for c in [0.5, 0.7, 1.0, 1.5, 2.2] {
        let h = indicator(c);
        let norm = triple_product_density(&f, &g, &h, &ctrl).unwrap().lp_norm(2.0);
        let size = cap_measure(&arc, &Cap::new(c, 0.05).unwrap()) * 0.1 * 0.1;
        values.push(norm / size.sqrt());
    }
    assert!(values[2..].windows(2).all(|w| w[1] < w[0]), "{values:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn bilinear_form_is_symmetric(
        f in prop::collection::vec(-1.0f64..1.0, 33),
        g in prop::collection::vec(-1.0f64..1.0, 33),
        alpha in 0.1f64..0.9,
    ) {
        let a = bilinear_form(&f, &g, 0.05, alpha).unwrap();
        let b = bilinear_form(&g, &f, 0.05, alpha).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()));
    }
}
