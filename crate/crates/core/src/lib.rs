//! Point counts on superelliptic curves `y^m = f(x)` over finite fields,
//! on their normalizations, and the limiting distributions of those counts
//! as `deg f` grows.

pub mod curvemodel;
pub mod ff;
pub mod harness;
pub mod polyring;
pub mod theorydist;

pub use curvemodel::{CurveError, SuperellipticModel};
pub use ff::{make_field, FieldElement, FieldSpec};
pub use polyring::{Poly, SquarefreeDecomposition};
pub use theorydist::{Pmf, Rational, TheoremParams, Variant};

/// Exact per-site and total laws.
pub type ExactDist = Pmf<Rational>;
/// Floating-point laws for display and plotting.
pub type FloatDist = Pmf<f64>;
