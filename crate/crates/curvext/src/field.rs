//! Densities on arcs, plane grids and the quadrature primitives shared by
//! the other modules.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::arc::{Cap, ConvexArc};
use crate::error::{invalid, Result};
use crate::quadrature::simpson_weights;

/// Measure carried by the arc.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    /// Arclength measure `dσ = ds`.
    #[default]
    Arclength,
    /// Projection measure `dy` on a graph arc.
    Projection,
}

/// Complex samples of a density on the parameter grid of an arc.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcFunction {
    arc: Arc<ConvexArc>,
    values: Vec<Complex64>,
    measure: MeasureKind,
}

impl ArcFunction {
    pub fn new(arc: Arc<ConvexArc>, values: Vec<Complex64>, measure: MeasureKind) -> Result<Self> {
        if values.len() != arc.n() {
            return invalid(format!("{} values for an arc with {} samples", values.len(), arc.n()));
        }
        if measure == MeasureKind::Projection && !arc.is_graph() {
            return invalid("projection measure requires a graph-built arc");
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return invalid("function values must be finite");
        }
        Ok(ArcFunction { arc, values, measure })
    }

    pub fn from_real(arc: Arc<ConvexArc>, values: Vec<f64>, measure: MeasureKind) -> Result<Self> {
        Self::new(arc, values.into_iter().map(|v| Complex64::new(v, 0.0)).collect(), measure)
    }

    /// Samples `f(p)` where `p` is the arc parameter (arclength or graph variable).
    pub fn from_param_fn(
        arc: Arc<ConvexArc>,
        measure: MeasureKind,
        f: impl Fn(f64) -> Complex64,
    ) -> Result<Self> {
        let values = arc.param().iter().map(|&p| f(p)).collect();
        Self::new(arc, values, measure)
    }

    /// Samples `f(s)` at the arclength of every sample.
    pub fn from_arclength_fn(
        arc: Arc<ConvexArc>,
        measure: MeasureKind,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let values = arc.s().iter().map(|&s| Complex64::new(f(s), 0.0)).collect();
        Self::new(arc, values, measure)
    }

    pub fn zeros(arc: Arc<ConvexArc>, measure: MeasureKind) -> Result<Self> {
        let n = arc.n();
        Self::new(arc, vec![Complex64::new(0.0, 0.0); n], measure)
    }

    /// Same arc and measure, new values.
    pub fn with_values(&self, values: Vec<Complex64>) -> Result<Self> {
        Self::new(self.arc.clone(), values, self.measure)
    }

    pub fn with_real_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::from_real(self.arc.clone(), values, self.measure)
    }

    pub fn arc(&self) -> &ConvexArc {
        &self.arc
    }
    pub fn arc_handle(&self) -> Arc<ConvexArc> {
        self.arc.clone()
    }
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
    pub fn measure(&self) -> MeasureKind {
        self.measure
    }
    pub fn len(&self) -> usize {
        self.values.len()
    }
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Real parts of the samples.
    pub fn real_values(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0 && v.re >= 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.re == 0.0 && v.im == 0.0)
    }

    /// Quadrature weights of `dσ` at each sample.
    pub fn weights(&self) -> Vec<f64> {
        measure_weights(&self.arc, self.measure)
    }

    /// `‖f‖_{L²(σ)}`.
    pub fn l2_sigma_norm(&self) -> f64 {
        self.lp_integral(2.0).sqrt()
    }

    /// `∫ |f|^p dσ`.
    pub fn lp_integral(&self, p: f64) -> f64 {
        let w = self.weights();
        let terms: Vec<f64> = self.values.iter().zip(&w).map(|(v, w)| w * v.norm().powf(p)).collect();
        crate::quadrature::pairwise_sum(&terms)
    }

    /// `∫ f dσ`.
    pub fn integral(&self) -> Complex64 {
        let w = self.weights();
        self.values.iter().zip(&w).map(|(v, w)| v * w).sum()
    }

    pub fn scale(&self, c: f64) -> ArcFunction {
        ArcFunction {
            arc: self.arc.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
            measure: self.measure,
        }
    }

    /// `f / ‖f‖₂`; rejects the zero function.
    pub fn normalized(&self) -> Result<ArcFunction> {
        let n = self.l2_sigma_norm();
        if !(n > 0.0) {
            return invalid("cannot normalize the zero function");
        }
        Ok(self.scale(1.0 / n))
    }

    pub fn add(&self, other: &ArcFunction) -> Result<ArcFunction> {
        self.check_compatible(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        self.with_values(values)
    }

    pub fn sub(&self, other: &ArcFunction) -> Result<ArcFunction> {
        self.check_compatible(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        self.with_values(values)
    }

    pub fn check_compatible(&self, other: &ArcFunction) -> Result<()> {
        if !Arc::ptr_eq(&self.arc, &other.arc) && *self.arc != *other.arc {
            return invalid("functions live on different arcs");
        }
        if self.measure != other.measure {
            return invalid("functions carry different measures");
        }
        Ok(())
    }

    /// Zeroes the samples outside the cap.
    ///
    /// The cap ends snap to the nearest samples; samples between the snapped
    /// ends keep their values and all others become zero.
    pub fn restrict_to_cap(&self, cap: &Cap) -> Result<ArcFunction> {
        let cap = Cap::new(cap.center, cap.radius)?;
        if !(0.0..=self.arc.length()).contains(&cap.center) {
            return invalid(format!("cap center {} outside [0, {}]", cap.center, self.arc.length()));
        }
        let zero = Complex64::new(0.0, 0.0);
        let values = match self.arc.cap_indices(&cap) {
            Some((lo, hi)) => {
                self.values.iter().enumerate().map(|(i, v)| if i >= lo && i <= hi { *v } else { zero }).collect()
            }
            None => vec![zero; self.len()],
        };
        self.with_values(values)
    }

    /// Linear interpolation of the samples at arclength `s` (zero outside).
    pub fn value_at(&self, s: f64) -> Complex64 {
        let arc = &self.arc;
        if s < 0.0 || s > arc.length() {
            return Complex64::new(0.0, 0.0);
        }
        let (k, p) = arc.param_at(s);
        let t = (p - arc.param()[k]) / arc.param_step();
        self.values[k] * (1.0 - t) + self.values[k + 1] * t
    }

    /// Rows `(s, Re f, Im f)`.
    pub fn to_rows(&self) -> Vec<[f64; 3]> {
        self.arc.s().iter().zip(&self.values).map(|(s, v)| [*s, v.re, v.im]).collect()
    }
}

/// Quadrature weights of a measure on the arc's sample grid.
pub fn measure_weights(arc: &ConvexArc, measure: MeasureKind) -> Vec<f64> {
    let w = simpson_weights(arc.n(), arc.param_step());
    match measure {
        MeasureKind::Projection => w,
        MeasureKind::Arclength => w.iter().zip(arc.speed()).map(|(w, v)| w * v).collect(),
    }
}

/// A rectangular node grid in the `(x, t)` plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlaneGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub nx: usize,
    pub nt: usize,
}

impl PlaneGrid {
    pub fn new(x_min: f64, x_max: f64, t_min: f64, t_max: f64, nx: usize, nt: usize) -> Result<Self> {
        let g = PlaneGrid { x_min, x_max, t_min, t_max, nx, nt };
        g.validate()?;
        Ok(g)
    }

    /// Symmetric square grid `[-half, half]²`.
    pub fn square(half: f64, n: usize) -> Result<Self> {
        Self::new(-half, half, -half, half, n, n)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.nt < 2 {
            return invalid("plane grid needs at least two nodes per axis");
        }
        let ok = |a: f64, b: f64| a.is_finite() && b.is_finite() && b > a;
        if !ok(self.x_min, self.x_max) || !ok(self.t_min, self.t_max) {
            return invalid("plane grid ranges must be finite and nondegenerate");
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }
    pub fn dt(&self) -> f64 {
        (self.t_max - self.t_min) / (self.nt - 1) as f64
    }
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }
    pub fn t(&self, j: usize) -> f64 {
        self.t_min + j as f64 * self.dt()
    }
    pub fn len(&self) -> usize {
        self.nx * self.nt
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Node of flat index `k` (x-major: `k = i·nt + j`).
    pub fn node(&self, k: usize) -> (f64, f64) {
        (self.x(k / self.nt), self.t(k % self.nt))
    }

    /// Largest `|(x, t)|` over the grid.
    pub fn max_radius(&self) -> f64 {
        let x = self.x_min.abs().max(self.x_max.abs());
        let t = self.t_min.abs().max(self.t_max.abs());
        x.hypot(t)
    }
}

/// Complex samples on a [`PlaneGrid`], stored x-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    pub grid: PlaneGrid,
    pub values: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(grid: PlaneGrid, values: Vec<Complex64>) -> Result<Self> {
        grid.validate()?;
        if values.len() != grid.len() {
            return invalid(format!("field has {} values for a {}-node grid", values.len(), grid.len()));
        }
        Ok(ComplexField { grid, values })
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.grid.nt + j]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Rows `(x, t, Re, Im)`.
    pub fn to_rows(&self) -> Vec<[f64; 4]> {
        self.values
            .iter()
            .enumerate()
            .map(|(k, v)| {
                let (x, t) = self.grid.node(k);
                [x, t, v.re, v.im]
            })
            .collect()
    }
}

/// A real density on an arc described declaratively.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    /// `amplitude·exp(−(s − center)²/(2 width²))` in arclength.
    Gaussian {
        center: f64,
        width: f64,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// Smooth compactly supported bump `exp(1 − 1/(1 − z²))`, `z = (s − center)/halfwidth`.
    Bump {
        center: f64,
        halfwidth: f64,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// `amplitude` on the cap, zero elsewhere.
    CapIndicator {
        center: f64,
        radius: f64,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// `exp(−scale·(p − center)²/2)` in the arc parameter (the graph variable on graph arcs).
    GraphGaussian {
        scale: f64,
        #[serde(default)]
        center: f64,
    },
    /// Samples at arclengths `s`, linearly interpolated (zero outside their range).
    Samples { s: Vec<f64>, values: Vec<f64> },
    /// Sum of the listed densities.
    Sum { terms: Vec<FunctionSpec> },
}

fn one() -> f64 {
    1.0
}

impl FunctionSpec {
    /// Evaluates the density at arclength `s` and parameter `p`.
    fn eval(&self, s: f64, p: f64) -> f64 {
        match self {
            FunctionSpec::Gaussian { center, width, amplitude } => {
                amplitude * (-(s - center).powi(2) / (2.0 * width * width)).exp()
            }
            FunctionSpec::Bump { center, halfwidth, amplitude } => {
                let z = (s - center) / halfwidth;
                if z.abs() < 1.0 {
                    amplitude * (1.0 - 1.0 / (1.0 - z * z)).exp()
                } else {
                    0.0
                }
            }
            FunctionSpec::CapIndicator { .. } => unreachable!("cap indicators are evaluated by restriction"),
            FunctionSpec::GraphGaussian { scale, center } => (-0.5 * scale * (p - center).powi(2)).exp(),
            FunctionSpec::Samples { s: grid, values } => {
                if s < grid[0] || s > grid[grid.len() - 1] {
                    return 0.0;
                }
                let k = grid.partition_point(|&v| v <= s).clamp(1, grid.len() - 1) - 1;
                let t = (s - grid[k]) / (grid[k + 1] - grid[k]);
                values[k] * (1.0 - t) + values[k + 1] * t
            }
            FunctionSpec::Sum { terms } => terms.iter().map(|t| t.eval(s, p)).sum(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64, name: &str| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                invalid(format!("{name} must be positive, got {v}"))
            }
        };
        match self {
            FunctionSpec::Gaussian { width, .. } => pos(*width, "width"),
            FunctionSpec::Bump { halfwidth, .. } => pos(*halfwidth, "halfwidth"),
            FunctionSpec::CapIndicator { radius, .. } => pos(*radius, "radius"),
            FunctionSpec::GraphGaussian { scale, .. } => pos(*scale, "scale"),
            FunctionSpec::Samples { s, values } => {
                if s.len() < 2 || s.len() != values.len() {
                    return invalid("samples need matching s and values of length >= 2");
                }
                if s.windows(2).any(|w| w[1] <= w[0]) {
                    return invalid("sample positions must be strictly increasing");
                }
                Ok(())
            }
            FunctionSpec::Sum { terms } => {
                if terms.is_empty() {
                    return invalid("sum needs at least one term");
                }
                terms.iter().try_for_each(|t| t.validate())
            }
        }
    }

    /// Samples the density on `arc`.
    pub fn build(&self, arc: Arc<ConvexArc>, measure: MeasureKind) -> Result<ArcFunction> {
        self.validate()?;
        if let FunctionSpec::CapIndicator { center, radius, amplitude } = self {
            let ones = ArcFunction::from_real(arc.clone(), vec![*amplitude; arc.n()], measure)?;
            return ones.restrict_to_cap(&Cap::new(*center, *radius)?);
        }
        if let FunctionSpec::Sum { terms } = self {
            let mut acc = ArcFunction::zeros(arc.clone(), measure)?;
            for t in terms {
                acc = acc.add(&t.build(arc.clone(), measure)?)?;
            }
            return Ok(acc);
        }
        let values = arc.s().iter().zip(arc.param()).map(|(&s, &p)| self.eval(s, p)).collect();
        ArcFunction::from_real(arc, values, measure)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arc::CurveSpec;

    fn circle() -> Arc<ConvexArc> {
        Arc::new(ConvexArc::build(&CurveSpec::Circle { radius: 1.0, extent: 1.5 }, 1025).unwrap())
    }

    #[test]
    fn constant_norm_is_root_length() {
        let arc = circle();
        let f = ArcFunction::from_real(arc.clone(), vec![1.0; arc.n()], MeasureKind::Arclength).unwrap();
        assert!((f.l2_sigma_norm() - 1.5f64.sqrt()).abs() < 1e-12);
        assert_eq!(ArcFunction::zeros(arc, MeasureKind::Arclength).unwrap().l2_sigma_norm(), 0.0);
    }

    #[test]
    fn projection_requires_graph() {
        let arc = circle();
        assert!(ArcFunction::zeros(arc, MeasureKind::Projection).is_err());
    }

    #[test]
    fn cap_restriction_is_idempotent_and_orthogonal() {
        let arc = circle();
        let f = FunctionSpec::Gaussian { center: 0.7, width: 0.3, amplitude: 1.0 }
            .build(arc, MeasureKind::Arclength)
            .unwrap();
        let cap = Cap::new(0.5, 0.2).unwrap();
        let g = f.restrict_to_cap(&cap).unwrap();
        assert_eq!(g.restrict_to_cap(&cap).unwrap(), g);
        let rest = f.sub(&g).unwrap();
        let lhs = f.l2_sigma_norm().powi(2);
        let rhs = g.l2_sigma_norm().powi(2) + rest.l2_sigma_norm().powi(2);
        assert!((lhs - rhs).abs() < 1e-3 * lhs);
        assert!(f.restrict_to_cap(&Cap { center: 0.5, radius: -1.0 }).is_err());
    }

    #[test]
    fn function_spec_round_trips_json() {
        let spec = FunctionSpec::Sum {
            terms: vec![
                FunctionSpec::Bump { center: 0.3, halfwidth: 0.1, amplitude: 1.0 },
                FunctionSpec::CapIndicator { center: 1.0, radius: 0.2, amplitude: 2.0 },
            ],
        };
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<FunctionSpec>(&text).unwrap(), spec);
    }
}
