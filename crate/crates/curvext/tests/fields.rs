//! Sampled functions on arcs: norms, cap restriction and plane grids.

use std::f64::consts::PI;
use std::sync::Arc;

use curvext::{ArcFunction, Cap, ConvexArc, CurveSpec, FunctionSpec, MeasureKind, PlaneGrid};
use proptest::prelude::*;

fn circle(extent: f64, n: usize) -> Arc<ConvexArc> {
    Arc::new(ConvexArc::build(&CurveSpec::Circle { radius: 1.0, extent }, n).unwrap())
}

#[test]
fn constant_and_zero_norms() {
    let arc = circle(1.7, 513);
    let one = ArcFunction::from_real(arc.clone(), vec![1.0; arc.n()], MeasureKind::Arclength).unwrap();
    assert!((one.l2_sigma_norm() - 1.7f64.sqrt()).abs() < 1e-12);
    let zero = ArcFunction::zeros(arc, MeasureKind::Arclength).unwrap();
    assert_eq!(zero.l2_sigma_norm(), 0.0);
    assert!(zero.normalized().is_err());
}

#[test]
fn gaussian_norm_under_projection_measure() {
    let arc = Arc::new(ConvexArc::build(&CurveSpec::Parabola { mu: 1.0, halfwidth: 8.0 }, 4001).unwrap());
    let g = FunctionSpec::GraphGaussian { scale: 1.0, center: 0.0 }.build(arc, MeasureKind::Projection).unwrap();
    assert!((g.l2_sigma_norm() - PI.powf(0.25)).abs() < 1e-8);
}

#[test]
fn simpson_error_drops_at_fourth_order() {
    let exact = 0.5 + 2f64.sin() / 4.0;
    let err = |n: usize| {
        let arc = circle(1.0, n);
        let f = ArcFunction::from_real(arc.clone(), arc.s().iter().map(|s| s.cos()).collect(), MeasureKind::Arclength)
            .unwrap();
        (f.lp_integral(2.0) - exact).abs()
    };
    let (coarse, fine) = (err(65), err(129));
    assert!(coarse > 0.0 && coarse / fine > 8.0, "{coarse:e} {fine:e}");
}

#[test]
fn half_length_cap_of_constant() {
    let arc = circle(2.0, 2001);
    let len = arc.length();
    let one = ArcFunction::from_real(arc.clone(), vec![1.0; arc.n()], MeasureKind::Arclength).unwrap();
    let g = one.restrict_to_cap(&Cap::new(len / 2.0, len / 4.0).unwrap()).unwrap();
    let h = arc.max_arclength_step();
    assert!((g.l2_sigma_norm() - (len / 2.0).sqrt()).abs() < 2.0 * h);
}

#[test]
fn restriction_to_whole_and_disjoint_caps() {
    let arc = circle(2.0, 801);
    let len = arc.length();
    let f = FunctionSpec::Bump { center: len / 8.0, halfwidth: len / 8.0, amplitude: 1.0 }
        .build(arc.clone(), MeasureKind::Arclength)
        .unwrap();
    assert_eq!(f.restrict_to_cap(&Cap::new(len / 2.0, len).unwrap()).unwrap(), f);
    let far = f.restrict_to_cap(&Cap::new(0.75 * len, 0.1 * len).unwrap()).unwrap();
    assert!(far.is_zero());
    assert!(Cap::new(0.5, 0.0).is_err() && Cap::new(0.5, -1.0).is_err());
}

#[test]
fn plane_grid_validation_and_rows() {
    assert!(PlaneGrid::new(1.0, -1.0, 0.0, 1.0, 8, 8).is_err());
    assert!(PlaneGrid::new(-1.0, 1.0, 0.0, 1.0, 1, 8).is_err());
    let g = PlaneGrid::square(2.0, 5).unwrap();
    assert_eq!(g.len(), 25);
    assert!((g.dx() - 1.0).abs() < 1e-15);
    assert_eq!(g.node(0), (-2.0, -2.0));
    assert_eq!(g.node(24), (2.0, 2.0));
}

#[test]
fn function_specs_validate() {
    assert!(FunctionSpec::Gaussian { center: 0.0, width: 0.0, amplitude: 1.0 }.validate().is_err());
    assert!(FunctionSpec::Samples { s: vec![0.0, 0.0], values: vec![1.0, 1.0] }.validate().is_err());
    assert!(FunctionSpec::Sum { terms: vec![] }.validate().is_err());
    let arc = circle(1.0, 129);
    let spec = FunctionSpec::GraphGaussian { scale: 1.0, center: 0.0 };
    assert!(spec.build(arc, MeasureKind::Projection).is_err());
}

fn random_function(values: Vec<f64>) -> ArcFunction {
    let arc = circle(2.0, values.len());
    ArcFunction::from_real(arc, values, MeasureKind::Arclength).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cap_restriction_splits_the_norm(
        values in prop::collection::vec(-2.0f64..2.0, 129),
        center in 0.0f64..2.0,
        radius in 0.01f64..1.5,
    ) {
        let f = random_function(values);
        let g = f.restrict_to_cap(&Cap::new(center, radius).unwrap()).unwrap();
        let rest = f.sub(&g).unwrap();
        let total = f.lp_integral(2.0);
        let split = g.lp_integral(2.0) + rest.lp_integral(2.0);
        prop_assert!((total - split).abs() <= 1e-12 * total.max(1e-300));
        prop_assert_eq!(g.restrict_to_cap(&Cap::new(center, radius).unwrap()).unwrap(), g);
    }

    #[test]
    fn norm_is_homogeneous(values in prop::collection::vec(-2.0f64..2.0, 129), c in -5.0f64..5.0) {
        let f = random_function(values);
        let lhs = f.scale(c).l2_sigma_norm();
        prop_assert!((lhs - c.abs() * f.l2_sigma_norm()).abs() <= 1e-12 * (1.0 + lhs));
    }
}
