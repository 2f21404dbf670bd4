//! `cap-metric`: metric axioms of the hyperbolic cap distance on random
//! triples and the decay of normalized cap interactions with distance.

use curvext::caps::cap_distance;
use curvext::convolution::{cap_interaction, cap_measure};
use curvext::{Cap, CurveSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::RunOptions;
use crate::config::{build_arc, check_positive, default_arc_n};
use crate::error::{config_err, CliResult};
use crate::report::{csv_artifact, Criterion, Relation, Report};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapMetricConfig {
    /// Seed of the random triples.
    pub seed: u64,
    #[serde(default = "default_triples")]
    pub triples: usize,
    #[serde(default = "default_center_range")]
    pub center_range: [f64; 2],
    #[serde(default = "default_radius_range")]
    pub radius_range: [f64; 2],
    /// Allowed excess in the triangle inequality.
    #[serde(default = "default_triangle_tolerance")]
    pub triangle_tolerance: f64,
    /// Arc carrying the interaction family.
    pub curve: CurveSpec,
    #[serde(default = "default_arc_n")]
    pub arc_n: usize,
    #[serde(default = "default_base")]
    pub base: Cap,
    /// Caps paired with `base`, ordered by increasing distance.
    #[serde(default = "default_family")]
    pub family: Vec<Cap>,
}

fn default_triples() -> usize {
    1000
}
fn default_center_range() -> [f64; 2] {
    [-5.0, 5.0]
}
fn default_radius_range() -> [f64; 2] {
    [0.01, 3.0]
}
fn default_triangle_tolerance() -> f64 {
    1e-12
}
fn default_base() -> Cap {
    Cap { center: 0.1, radius: 0.05 }
}
fn default_family() -> Vec<Cap> {
    [0.2, 0.3, 0.5, 0.8, 1.3].iter().map(|&c| Cap { center: c, radius: 0.05 }).collect()
}

#[derive(Debug, Serialize)]
struct PairRow {
    center: f64,
    radius: f64,
    distance: f64,
    interaction: f64,
    normalized: f64,
}

#[derive(Debug, Serialize)]
struct Results {
    asymmetric_pairs: usize,
    max_triangle_excess: f64,
    pairs: Vec<PairRow>,
}

pub fn run(cfg: &CapMetricConfig, _opts: &RunOptions) -> CliResult<Report> {
    let [c_lo, c_hi] = cfg.center_range;
    let [r_lo, r_hi] = cfg.radius_range;
    if !(c_lo < c_hi && c_lo.is_finite() && c_hi.is_finite()) || !(0.0 < r_lo && r_lo < r_hi && r_hi.is_finite()) {
        return config_err("center_range and radius_range must be increasing, with positive radii");
    }
    check_positive("triangle_tolerance", cfg.triangle_tolerance)?;
    if cfg.triples == 0 {
        return config_err("triples must be positive");
    }
    if cfg.family.len() < 3 {
        return config_err("family needs at least three caps");
    }
    let base = Cap::new(cfg.base.center, cfg.base.radius)?;
    let family = cfg.family.iter().map(|c| Cap::new(c.center, c.radius)).collect::<Result<Vec<_>, _>>()?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut asymmetric_pairs = 0;
    let mut max_triangle_excess = f64::NEG_INFINITY;
    for _ in 0..cfg.triples {
        let mut cap = || Cap { center: rng.gen_range(c_lo..c_hi), radius: rng.gen_range(r_lo..r_hi) };
        let (x, y, z) = (cap(), cap(), cap());
        if cap_distance(&x, &y) != cap_distance(&y, &x) || cap_distance(&x, &x) != 0.0 {
            asymmetric_pairs += 1;
        }
        let excess = cap_distance(&x, &z) - cap_distance(&x, &y) - cap_distance(&y, &z);
        max_triangle_excess = max_triangle_excess.max(excess);
    }

    let arc = build_arc(&cfg.curve, cfg.arc_n)?;
    let mut pairs = Vec::new();
    for c in &family {
        let interaction = cap_interaction(&arc, &base, c)?;
        pairs.push(PairRow {
            center: c.center,
            radius: c.radius,
            distance: cap_distance(&base, c),
            interaction,
            normalized: interaction / (cap_measure(&arc, &base) * cap_measure(&arc, c)).sqrt(),
        });
    }
    let distance_step = pairs.windows(2).map(|w| w[1].distance - w[0].distance).fold(f64::INFINITY, f64::min);
    // Decay is required from the second pair on.
    let decay_step = pairs[1..].windows(2).map(|w| w[1].normalized - w[0].normalized).fold(f64::NEG_INFINITY, f64::max);

    let artifact = csv_artifact("interaction.csv", &["center", "radius", "distance", "interaction", "normalized"], pairs.iter())?;
    let mut report = Report::new(Results { asymmetric_pairs, max_triangle_excess, pairs })?;
    report.criteria = vec![
        Criterion::new("symmetry", asymmetric_pairs as f64, Relation::Le, 0.0),
        Criterion::new("triangle", max_triangle_excess.max(0.0), Relation::Le, cfg.triangle_tolerance),
        Criterion::new("family_distance_increasing", distance_step, Relation::Gt, 0.0),
        Criterion::new("interaction_decreasing", decay_step, Relation::Lt, 0.0),
    ];
    report.artifacts = vec![artifact];
    Ok(report)
}
