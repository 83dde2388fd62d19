//! Convex hull volumes of curves through the top-level alternating path
//! signature.
//!
//! For a cyclic curve `x: [0,1] -> R^d` the volume of `conv(x)` equals the
//! level-`d` alternating signature `α^(d)(x)`. This crate computes that
//! quantity along several independent routes and cross-checks it against
//! purely geometric oracles:
//!
//! * [`curve`]: piecewise-linear and parametric curve families.
//! * [`signature`]: truncated tensor signatures, antisymmetrization, the
//!   exterior-algebra recursion for `α^(k)` and nested simplex quadrature.
//! * [`classify`]: sampling certificates for the torsion, strict
//!   determinant, d-order and cyclic classes.
//! * [`polytope`]: Gale-evenness triangulations of cyclic polytopes, exact
//!   2D/3D hulls and a Monte-Carlo volume estimator.
//! * [`decomposition`]: level-1/level-2 decompositions of `α^(k)`, skew
//!   spectra, Pfaffians and the eigenvalue volume formula.
//! * [`zonoid`]: the zonotope of a polygonal curve's derivative.

pub mod classify;
pub mod curve;
pub mod decomposition;
mod error;
pub mod linalg;
pub mod polytope;
pub mod signature;
pub mod zonoid;

pub use curve::{CurveFamily, CurveSpec, PiecewiseLinearCurve};
pub use error::{Error, Result};
pub use signature::{AlternatingTensor, SignatureTensor, TruncatedSignature};
