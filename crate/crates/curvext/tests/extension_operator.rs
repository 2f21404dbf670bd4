//! The extension operator, its closed forms on the parabola and the direct L⁶ norm.

use std::f64::consts::PI;
use std::sync::Arc;

use curvext::extension::{
    extend, foschi_constant, foschi_constant_sixth, gauss_poly_extension, gaussian_closed_form, l6_norm_direct,
    rayleigh, GaussianKind, L6Control,
};
use curvext::{ArcFunction, Complex64, ConvexArc, CurveSpec, FunctionSpec, MeasureKind, PlaneGrid};
use proptest::prelude::*;

fn parabola(halfwidth: f64, n: usize) -> Arc<ConvexArc> {
    Arc::new(ConvexArc::build(&CurveSpec::Parabola { mu: 1.0, halfwidth }, n).unwrap())
}

fn gaussian_on_parabola() -> ArcFunction {
    FunctionSpec::GraphGaussian { scale: 1.0, center: 0.0 }.build(parabola(8.0, 4001), MeasureKind::Projection).unwrap()
}

fn single_point(x: f64, t: f64) -> PlaneGrid {
    PlaneGrid::new(x, x + 1.0, t, t + 1.0, 2, 2).unwrap()
}

#[test]
fn gaussian_extension_at_a_reference_point() {
    let f = gaussian_on_parabola();
    let value = extend(&f, &single_point(-1.0, 1.0)).unwrap().field.values[0];
    let w = Complex64::new(1.0, 1.0);
    let want = (2.0 * PI).sqrt() * w.powf(-0.5) * (-0.5 / w).exp();
    assert!((value - want).norm() < 1e-10, "{value} {want}");
    assert!((value - gaussian_closed_form(GaussianKind::G1, 1.0, 1.0, 1.0)).norm() < 1e-10);
}

#[test]
fn extension_at_origin_is_the_integral() {
    let arc = Arc::new(ConvexArc::build(&CurveSpec::Circle { radius: 1.0, extent: 2.0 }, 1001).unwrap());
    let f = FunctionSpec::Bump { center: 1.0, halfwidth: 0.7, amplitude: 2.0 }
        .build(arc.clone(), MeasureKind::Arclength)
        .unwrap();
    let at0 = extend(&f, &single_point(0.0, 0.0)).unwrap().field.values[0];
    assert!((at0 - f.integral()).norm() < 1e-13);
    let zero = ArcFunction::zeros(arc, MeasureKind::Arclength).unwrap();
    let z = extend(&zero, &PlaneGrid::square(3.0, 5).unwrap()).unwrap();
    assert_eq!(z.field.max_abs(), 0.0);
    assert_eq!(l6_norm_direct(&zero, &L6Control::default()).unwrap().value, 0.0);
}

#[test]
fn gaussian_forms_at_the_origin() {
    let root = (2.0 * PI).sqrt();
    assert!((gaussian_closed_form(GaussianKind::G1, 1.0, 0.0, 0.0) - root).norm() < 1e-14);
    assert!((gaussian_closed_form(GaussianKind::G2, 1.0, 0.0, 0.0) - root).norm() < 1e-14);
    for lambda in [0.5, 1.0, 3.0] {
        for t in [-2.0, 0.0, 0.7] {
            assert_eq!(gaussian_closed_form(GaussianKind::Phi1, lambda, 0.0, t).norm(), 0.0);
        }
    }
}

#[test]
fn foschi_constant_values() {
    assert!((foschi_constant(1.0) - 2.287_335).abs() < 1e-6);
    assert!((foschi_constant(2.0) - (2.0 * PI).sqrt() * 12f64.powf(-1.0 / 12.0)).abs() < 1e-14);
    assert!((foschi_constant(2.0) - 2.037_784).abs() < 1e-6);
    assert!((foschi_constant_sixth(1.0) - (2.0 * PI).powi(3) / 3f64.sqrt()).abs() < 1e-9);
}

#[test]
fn modulation_shifts_the_field() {
    let arc = Arc::new(ConvexArc::build(&CurveSpec::Circle { radius: 1.0, extent: 2.0 }, 801).unwrap());
    let f = FunctionSpec::Bump { center: 1.0, halfwidth: 0.8, amplitude: 1.0 }
        .build(arc.clone(), MeasureKind::Arclength)
        .unwrap();
    let (x0, t0) = (1.5, -0.75);
    let modulated: Vec<Complex64> = f
        .values()
        .iter()
        .zip(arc.gamma())
        .map(|(v, g)| v * Complex64::from_polar(1.0, -(x0 * g[0] + t0 * g[1])))
        .collect();
    let fm = f.with_values(modulated).unwrap();
    let grid = PlaneGrid::new(-3.0, 3.0, -2.0, 2.0, 7, 5).unwrap();
    let shifted = PlaneGrid::new(-3.0 + x0, 3.0 + x0, -2.0 + t0, 2.0 + t0, 7, 5).unwrap();
    let a = extend(&fm, &grid).unwrap();
    let b = extend(&f, &shifted).unwrap();
    for (u, v) in a.field.values.iter().zip(&b.field.values) {
        assert!((u - v).norm() < 1e-12);
    }
}

#[test]
fn field_is_bounded_by_the_total_mass() {
    let arc = Arc::new(ConvexArc::build(&CurveSpec::Circle { radius: 1.0, extent: 2.0 }, 801).unwrap());
    let f = FunctionSpec::Sum {
        terms: vec![
            FunctionSpec::Bump { center: 0.6, halfwidth: 0.3, amplitude: 1.0 },
            FunctionSpec::Gaussian { center: 1.4, width: 0.2, amplitude: 0.5 },
        ],
    }
    .build(arc, MeasureKind::Arclength)
    .unwrap();
    let mass = f.lp_integral(1.0);
    let ext = extend(&f, &PlaneGrid::square(20.0, 41).unwrap()).unwrap();
    assert!(ext.field.max_abs() <= mass * (1.0 + 1e-12));
}

#[test]
fn rayleigh_quotient_is_scale_invariant() {
    let f = FunctionSpec::GraphGaussian { scale: 1.0, center: 0.0 }
        .build(parabola(6.0, 2401), MeasureKind::Projection)
        .unwrap();
    let base = rayleigh(&f, &L6Control::default()).unwrap().value;
    for c in [7.0, 0.01, -3.0] {
        let scaled = rayleigh(&f.scale(c), &L6Control::default()).unwrap().value;
        assert!((scaled - base).abs() < 1e-12 * base);
    }
    assert!(rayleigh(&f.scale(0.0), &L6Control::default()).is_err());
}

#[test]
fn galilean_modulation_preserves_the_quotient() {
    let arc = parabola(6.0, 2401);
    let f = ArcFunction::from_param_fn(arc.clone(), MeasureKind::Projection, |y| Complex64::new((-0.5 * y * y).exp(), 0.0))
        .unwrap();
    let g = ArcFunction::from_param_fn(arc, MeasureKind::Projection, |y| {
        Complex64::from_polar((-0.5 * y * y).exp(), 1.0 * y)
    })
    .unwrap();
    let a = rayleigh(&f, &L6Control::default()).unwrap().value;
    let b = rayleigh(&g, &L6Control::default()).unwrap().value;
    assert!((a - b).abs() < 1e-3 * a, "{a} {b}");
}

#[test]
fn dilation_scales_the_quotient_by_a_sixth_root() {
    let arc = Arc::new(ConvexArc::build(&CurveSpec::Circle { radius: 1.0, extent: 2.0 }, 1201).unwrap());
    let spec = FunctionSpec::Gaussian { center: 1.0, width: 0.25, amplitude: 1.0 };
    let base = rayleigh(&spec.build(arc.clone(), MeasureKind::Arclength).unwrap(), &L6Control::default()).unwrap();
    for c in [0.5, 2.0] {
        let dilated = Arc::new(arc.dilate(c));
        let f = ArcFunction::from_real(
            dilated,
            spec.build(arc.clone(), MeasureKind::Arclength).unwrap().real_values(),
            MeasureKind::Arclength,
        )
        .unwrap();
        let q = rayleigh(&f, &L6Control::default().with_scale(c, c)).unwrap();
        let want = base.value * c.powf(1.0 / 6.0);
        assert!((q.value - want).abs() < 1e-6 * want, "c={c}: {} vs {want}", q.value);
    }
}

#[test]
fn gaussian_quotient_matches_the_sharp_constant() {
    let r = rayleigh(&gaussian_on_parabola(), &L6Control::default()).unwrap();
    assert!((r.value / foschi_constant(1.0) - 1.0).abs() < 1e-6);
    assert!(r.error_estimate < 1e-5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn polynomial_gaussian_closed_form_matches_quadrature(
        coeffs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..5),
        x in -3.0f64..3.0,
        t in -3.0f64..3.0,
    ) {
        let c: Vec<Complex64> = coeffs.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
        let f = ArcFunction::from_param_fn(parabola(9.0, 6001), MeasureKind::Projection, |y| {
            c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, ck| acc * y + ck) * (-0.5 * y * y).exp()
        })
        .unwrap();
        let numeric = extend(&f, &single_point(-x, t)).unwrap().field.values[0];
        let closed = gauss_poly_extension(&c, 1.0, x, t);
        prop_assert!((numeric - closed).norm() < 1e-8 * (1.0 + closed.norm()), "{} {}", numeric, closed);
    }
}
