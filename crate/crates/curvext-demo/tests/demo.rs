//! Native checks of the functions behind the browser bindings.

use curvext_demo::{arc_length, cap_pair, field_modulus, triple_density, DemoError};

const PARABOLA: &str = r#"{"kind": "parabola", "mu": 1.0, "halfwidth": 3.0}"#;
const CIRCLE: &str = r#"{"kind": "circle", "radius": 1.0, "extent": 2.0}"#;

#[test]
fn field_modulus_peaks_at_origin_for_a_positive_density() {
    let f = r#"{"kind": "graph_gaussian", "scale": 1.0}"#;
    let n = 21;
    let v = field_modulus(PARABOLA, f, "projection", 4.0, n).unwrap();
    assert_eq!(v.len(), n * n);
    let centre = v[(n / 2) * n + n / 2];
    assert!(v.iter().all(|x| x.is_finite() && *x <= centre + 1e-12));
    // |f̂σ(0)| = ∫ e^{−y²/2} dy over the graph, up to the truncated tails.
    assert!((centre - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-2, "{centre}");
}

#[test]
fn triple_density_has_the_mass_of_the_cubed_integral() {
    let f = r#"{"kind": "bump", "center": 1.0, "halfwidth": 0.5}"#;
    let n = 48;
    let out = triple_density(CIRCLE, f, "arclength", n).unwrap();
    assert_eq!(out.len(), 4 + n * n);
    let (x0, x1, t0, t1) = (out[0], out[1], out[2], out[3]);
    assert!(x0 < x1 && t0 < t1);
    let (hx, ht) = ((x1 - x0) / (n - 1) as f64, (t1 - t0) / (n - 1) as f64);
    let mass: f64 = out[4..].iter().sum::<f64>() * hx * ht;
    // ∫ bump ds for the bump exp(1 − 1/(1 − z²)) with halfwidth 0.5.
    let integral: f64 = 0.5 * 1.2069003224378743;
    assert!((mass / integral.powi(3) - 1.0).abs() < 0.05, "{mass}");
    assert!(out[4..].iter().all(|v| *v >= 0.0));
}

#[test]
fn cap_pair_is_symmetric_and_decays() {
    let near = cap_pair(CIRCLE, 0.5, 0.05, 0.7, 0.05).unwrap();
    let back = cap_pair(CIRCLE, 0.7, 0.05, 0.5, 0.05).unwrap();
    let far = cap_pair(CIRCLE, 0.5, 0.05, 1.5, 0.05).unwrap();
    assert_eq!(near.len(), 3);
    assert_eq!(near[0], back[0]);
    assert!((near[1] - back[1]).abs() <= 1e-12 * near[1]);
    assert!(far[0] > near[0]);
    assert!(far[2] < near[2]);
    assert_eq!(cap_pair(CIRCLE, 0.5, 0.05, 0.5, 0.05).unwrap()[0], 0.0);
}

#[test]
fn arc_length_of_a_circle_arc() {
    assert!((arc_length(CIRCLE).unwrap() - 2.0).abs() < 1e-9);
}

#[test]
fn bad_inputs_are_reported() {
    assert!(matches!(arc_length("{"), Err(DemoError::Json(_))));
    assert!(matches!(
        field_modulus(CIRCLE, r#"{"kind": "bump", "center": 1.0, "halfwidth": 0.5}"#, "weird", 1.0, 5),
        Err(DemoError::Measure(_))
    ));
    assert!(matches!(cap_pair(CIRCLE, 0.5, -1.0, 0.5, 0.1), Err(DemoError::Compute(_))));
    assert!(matches!(arc_length(r#"{"kind": "circle", "radius": 0.0, "extent": 1.0}"#), Err(DemoError::Compute(_))));
}
