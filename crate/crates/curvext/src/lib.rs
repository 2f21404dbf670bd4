//! Numerical toolkit for the Fourier extension operator on planar convex arcs.
//!
//! The crate evaluates `f̂σ`, its L⁶ norm by two independent routes, convolution
//! densities of arc measures, a cap decomposition of L² densities, the second
//! variation of the Strichartz functional at Gaussians, and an ascent search for
//! near-extremizers.

pub mod arc;
pub mod caps;
pub mod convolution;
pub mod error;
pub mod extension;
pub mod field;
mod par;
pub mod quadrature;
pub mod search;
pub mod variational;

pub use arc::{Cap, ConvexArc, CurveSpec};
pub use error::{Error, Result};
pub use field::{ArcFunction, ComplexField, FunctionSpec, MeasureKind, PlaneGrid};
pub use num_complex::Complex64;
