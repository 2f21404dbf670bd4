//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use curvext::caps::{cap_distance, decompose, DecomposeParams};
use curvext::convolution::{cap_interaction, cap_measure, triple_autoconv_sup_limit, DepositionControl};
use curvext::extension::{foschi_constant, l6_norm_convolution, l6_norm_direct, rayleigh, L6Control};
use curvext::search::{search, sequence_diagnostics, SearchParams, SequenceClass};
use curvext::variational::{
    compare_constants, explicit_integrals, kernel_directions, odd_mode_coefficients, xi_curvature, CompareParams,
    PerturbedParabola, QuadraticForm, XiControl,
};
use curvext::{ArcFunction, Cap, Complex64, ConvexArc, CurveSpec, FunctionSpec, MeasureKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(bool, String), curvext::Error>;

fn arc(spec: CurveSpec, n: usize) -> Arc<ConvexArc> {
    Arc::new(ConvexArc::build(&spec, n).expect("valid arc"))
}

fn gaussian_quotient(mu: f64) -> Result<(f64, f64), curvext::Error> {
    let a = arc(CurveSpec::Parabola { mu, halfwidth: 6.0 / mu.sqrt() }, 2401);
    let f = FunctionSpec::GraphGaussian { scale: mu, center: 0.0 }.build(a, MeasureKind::Projection)?;
    let r = rayleigh(&f, &L6Control::default())?;
    Ok((r.value, r.error_estimate))
}

fn foschi_constant_check() -> Outcome {
    let mut ok = true;
    let mut msg = Vec::new();
    for mu in [1.0, 2.0] {
        let t = Instant::now();
        let (q, _) = gaussian_quotient(mu)?;
        let rel = (q / foschi_constant(mu) - 1.0).abs();
        let secs = t.elapsed().as_secs_f64();
        ok &= rel <= 1e-3 && secs <= 120.0;
        msg.push(format!("mu={mu}: quotient {q:.7} vs {:.7}, rel err {rel:.1e} (tol 1e-3), {secs:.1}s", foschi_constant(mu)));
    }
    Ok((ok, msg.join("; ")))
}

fn scaling_law() -> Outcome {
    let (q1, _) = gaussian_quotient(1.0)?;
    let (q2, _) = gaussian_quotient(2.0)?;
    let ratio = q2 / q1;
    let target = 2f64.powf(-1.0 / 6.0);
    let rel = (ratio / target - 1.0).abs();
    Ok((rel <= 1e-3, format!("ratio {ratio:.7} vs 2^(-1/6) = {target:.7}, rel err {rel:.1e} (tol 1e-3)")))
}

fn triple_limit() -> Outcome {
    let t = Instant::now();
    let a = arc(CurveSpec::Circle { radius: 1.0, extent: 2.0 }, 4001);
    let lim = triple_autoconv_sup_limit(&a, 1.0, &[0.2, 0.1, 0.05])?;
    let target = 2.0 * PI / 3f64.sqrt();
    let rel = (lim.limit / target - 1.0).abs();
    let rel_norm = (lim.implied_norm / foschi_constant(1.0) - 1.0).abs();
    let secs = t.elapsed().as_secs_f64();
    Ok((
        rel <= 0.02 && rel_norm <= 0.01 && secs <= 180.0,
        format!(
            "limit {:.5} vs 2pi/sqrt3 = {target:.5} (rel {rel:.1e}, tol 2e-2); implied norm {:.5} vs C_F[1] (rel {rel_norm:.1e}, tol 1e-2); {secs:.1}s",
            lim.limit, lim.implied_norm
        ),
    ))
}

fn appendix_suite() -> Outcome {
    let t = Instant::now();
    let mut ok = true;
    let mut worst = (0.0f64, 0.0f64);
    for lambda in [0.5, 1.0, 2.0] {
        let e = explicit_integrals(lambda, 0.125)?;
        worst.0 = worst.0.max(e.max_rel_error());
        worst.1 = worst.1.max(e.max_zero_error());
        ok &= e.max_rel_error() <= 1e-5 && e.max_zero_error() <= 1e-8;
    }
    let secs = t.elapsed().as_secs_f64();
    ok &= secs <= 60.0;
    Ok((
        ok,
        format!("lambda in {{0.5,1,2}}: max rel err {:.1e} (tol 1e-5), max |II| {:.1e} (tol 1e-8), {secs:.2}s", worst.0, worst.1),
    ))
}

fn quadratic_form() -> Outcome {
    let q = QuadraticForm::new(1.0)?;
    let mut worst_kernel = 0.0f64;
    let mut dirs = kernel_directions();
    dirs.push(("odd_mode", odd_mode_coefficients(1.0)));
    for (_, c) in &dirs {
        let v = q.evaluate(c);
        worst_kernel = worst_kernel.max(v.value.abs() / v.scale);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut worst_random = f64::INFINITY;
    for _ in 0..20 {
        let deg = rng.gen_range(0..=6);
        let c: Vec<Complex64> =
            (0..=deg).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let v = q.evaluate(&c);
        worst_random = worst_random.min(v.value / v.scale);
    }
    Ok((
        worst_kernel <= 1e-4 && worst_random >= -1e-6,
        format!(
            "7 kernel inputs: max |Q|/scale {worst_kernel:.1e} (tol 1e-4); 20 random inputs: min Q/scale {worst_random:.3e} (tol -1e-6)"
        ),
    ))
}

fn xi_program() -> Outcome {
    let t = Instant::now();
    let ctrl = XiControl::default();
    let eps = [0.05, 0.1, 0.15];
    let mut ok = true;
    let mut msg = Vec::new();
    for a in [0.125, 0.17] {
        let pp = PerturbedParabola::new(1.0, a, 0.76)?;
        let c = xi_curvature(&pp, eps, &ctrl)?;
        let xi_mid = c.values[1].xi;
        ok &= c.relative_error <= 0.10 && c.extrapolated < 0.0 && xi_mid < 0.0;
        msg.push(format!(
            "a={a}: Xi''(0) est {:.3} vs {:.3} (rel {:.1e}, tol 1e-1; plain central difference {:.3}), Xi(0.1) = {xi_mid:.4}",
            c.extrapolated, c.closed_form, c.relative_error, c.central_difference
        ));
    }
    let pp = PerturbedParabola::new(1.0, 0.30, 0.76)?;
    let c = xi_curvature(&pp, eps, &ctrl)?;
    ok &= c.extrapolated > 0.0 && c.closed_form > 0.0;
    msg.push(format!("a=0.3: Xi''(0) est {:.3} vs {:.3} (positive)", c.extrapolated, c.closed_form));
    let secs = t.elapsed().as_secs_f64();
    ok &= secs <= 600.0;
    msg.push(format!("{secs:.1}s"));
    Ok((ok, msg.join("; ")))
}

fn strict_comparison() -> Outcome {
    let pp = PerturbedParabola::new(1.0, 0.125, 0.76)?;
    let a = arc(pp.spec(), 2001);
    let r = compare_constants(a, &CompareParams::default())?;
    Ok((
        r.margin > 3.0 * r.combined_error,
        format!(
            "C_hat lower {:.7} vs C_F[{}] = {:.7}: margin {:.3e} > 3 x combined error {:.3e}",
            r.c_hat_lower, r.lambda, r.c_f_lambda, r.margin, r.combined_error
        ),
    ))
}

fn decomposition() -> Outcome {
    let a = arc(CurveSpec::Circle { radius: 1.0, extent: 2.0 }, 2001);
    let centers = [0.5, 1.5];
    let f = FunctionSpec::Sum {
        terms: centers.iter().map(|&c| FunctionSpec::Bump { center: c, halfwidth: 0.02, amplitude: 1.0 }).collect(),
    }
    .build(a.clone(), MeasureKind::Arclength)?;
    let params = DecomposeParams {
        c_estimate: foschi_constant(1.0),
        max_steps: 20,
        residual_tol: 1e-3,
        deposition: DepositionControl { points: 200, cells: 64 },
    };
    let d = decompose(&f, &params)?;
    let rec = d.reconstruct()?;
    let recon_err = rec.values().iter().zip(f.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    let residual = d.residual.l2_sigma_norm();
    let h = a.max_arclength_step();
    let located = centers.iter().all(|&c| d.steps.iter().any(|s| (s.cap.center - c).abs() <= h * (1.0 + 1e-9)));
    let ok = recon_err == 0.0 && d.sandwich_holds() && residual < 1e-3 && d.steps.len() <= 20 && located;
    Ok((
        ok,
        format!(
            "{} steps, reconstruction max err {recon_err:.1e}, sandwich {}, residual L2 {residual:.1e} (tol 1e-3), bumps located within one step: {located}",
            d.steps.len(),
            d.sandwich_holds()
        ),
    ))
}

fn cap_metric_and_decay() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut sym = true;
    let mut worst_tri = f64::NEG_INFINITY;
    for _ in 0..1000 {
        let mut cap = || Cap::new(rng.gen_range(-5.0..5.0), rng.gen_range(0.01..3.0)).expect("positive radius");
        let (x, y, z) = (cap(), cap(), cap());
        sym &= cap_distance(&x, &y) == cap_distance(&y, &x) && cap_distance(&x, &x) == 0.0;
        let excess = cap_distance(&x, &z) - cap_distance(&x, &y) - cap_distance(&y, &z);
        worst_tri = worst_tri.max(excess);
    }
    let a = arc(CurveSpec::Circle { radius: 1.0, extent: 3.0 }, 2001);
    let c0 = Cap::new(0.1, 0.05)?;
    let mut normalized = Vec::new();
    let mut dist = Vec::new();
    for sep in [0.1, 0.2, 0.4, 0.7, 1.2] {
        let c1 = Cap::new(0.1 + sep, 0.05)?;
        let v = cap_interaction(&a, &c0, &c1)?;
        normalized.push(v / (cap_measure(&a, &c0) * cap_measure(&a, &c1)).sqrt());
        dist.push(cap_distance(&c0, &c1));
    }
    let decreasing = normalized[1..].windows(2).all(|w| w[1] < w[0]);
    let dist_increasing = dist.windows(2).all(|w| w[1] > w[0]);
    Ok((
        sym && worst_tri <= 1e-12 && decreasing && dist_increasing,
        format!(
            "1000 triples: symmetry {sym}, max triangle excess {worst_tri:.1e} (tol 1e-12); normalized interaction {:?}",
            normalized.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>()
        ),
    ))
}

fn two_route_consistency() -> Outcome {
    let circle = arc(CurveSpec::Circle { radius: 1.0, extent: 2.0 }, 1001);
    let parabola = arc(CurveSpec::Parabola { mu: 1.0, halfwidth: 3.0 }, 1201);
    let perturbed = arc(PerturbedParabola::new(1.0, 0.17, 0.76)?.spec(), 1001);
    let family: Vec<(&str, ArcFunction)> = vec![
        (
            "circle bump",
            FunctionSpec::Bump { center: 1.0, halfwidth: 0.6, amplitude: 1.0 }.build(circle, MeasureKind::Arclength)?,
        ),
        (
            "parabola gaussian",
            FunctionSpec::GraphGaussian { scale: 1.0, center: 0.0 }.build(parabola, MeasureKind::Projection)?,
        ),
        ("perturbed gaussian", {
            let c = perturbed.length() / 2.0;
            FunctionSpec::Gaussian { center: c, width: 0.2, amplitude: 1.0 }.build(perturbed, MeasureKind::Arclength)?
        }),
    ];
    let mut ok = true;
    let mut msg = Vec::new();
    for (name, f) in &family {
        let d = l6_norm_direct(f, &L6Control::default())?;
        let c = l6_norm_convolution(f, &DepositionControl::default())?;
        let rel = (c.value / d.value - 1.0).abs();
        ok &= rel <= 0.02;
        msg.push(format!("{name}: {:.5} vs {:.5} (rel {rel:.1e})", d.value, c.value));
    }
    msg.push("tol 2e-2".into());
    Ok((ok, msg.join("; ")))
}

fn concentrating_sequence(a: &Arc<ConvexArc>, center: f64) -> Result<Vec<ArcFunction>, curvext::Error> {
    [0.2, 0.1, 0.04, 0.02]
        .iter()
        .map(|&w| FunctionSpec::Bump { center, halfwidth: w, amplitude: 1.0 }.build(a.clone(), MeasureKind::Arclength))
        .collect()
}

fn search_sanity() -> Outcome {
    let t = Instant::now();
    let a = arc(CurveSpec::Parabola { mu: 1.0, halfwidth: 3.0 }, 1201);
    let f0 = FunctionSpec::Bump { center: a.length() / 2.0, halfwidth: 2.0, amplitude: 1.0 }
        .build(a.clone(), MeasureKind::Projection)?;
    let r = search(&f0, &SearchParams { max_iters: 100, ..SearchParams::default() })?;
    let target = foschi_constant(1.0) - 2e-3;
    let iters = r.trace.len() - 1;
    let reached = r.c_lower >= target && iters <= 100;

    // On |y| <= 0.4 the vertex is the unique curvature minimum.
    let pp = arc(PerturbedParabola::new(1.0, 0.17, 0.4)?.spec(), 2001);
    let vertex = pp.s()[1000];
    let at_min = sequence_diagnostics(&concentrating_sequence(&pp, vertex)?, 4)?;
    let away = sequence_diagnostics(&concentrating_sequence(&pp, vertex + 0.25)?, 4)?;
    let flat: Vec<ArcFunction> = (0..3)
        .map(|_| FunctionSpec::Bump { center: vertex, halfwidth: 0.8, amplitude: 1.0 }.build(pp.clone(), MeasureKind::Arclength))
        .collect::<Result<_, _>>()?;
    let diffuse = sequence_diagnostics(&flat, 4)?;
    let classified = matches!(at_min.class, SequenceClass::Concentrating { at_curvature_minimum: true, .. })
        && matches!(away.class, SequenceClass::Concentrating { at_curvature_minimum: false, .. })
        && diffuse.class == SequenceClass::Diffuse;
    let secs = t.elapsed().as_secs_f64();
    Ok((
        reached && classified,
        format!(
            "search reached {:.7} (target {target:.7}) in {iters} iterations; diagnostics at minimum / away / diffuse correct: {classified}; {secs:.1}s",
            r.c_lower
        ),
    ))
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("1 foschi constant", foschi_constant_check),
        ("2 scaling law", scaling_law),
        ("3 triple autoconvolution limit", triple_limit),
        ("4 explicit integral suite", appendix_suite),
        ("5 quadratic form", quadratic_form),
        ("6 trial deficit program", xi_program),
        ("7 strict constant comparison", strict_comparison),
        ("8 decomposition", decomposition),
        ("9 cap metric and interaction decay", cap_metric_and_decay),
        ("10 two-route L6 consistency", two_route_consistency),
        ("11 search sanity", search_sanity),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let (ok, detail) = match run() {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failed += 1;
        }
        println!("[{}] criterion {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    }
    println!("acceptance: {} of 11 criteria passed", 11 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
