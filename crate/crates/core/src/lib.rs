//! Curvature measures and mixed curvature measures of convex polytopes.
//!
//! The crate evaluates the face-sum representation of mixed curvature
//! measures of finitely many convex polytopes, the single-body curvature
//! (support) measures, and verifies the iterated translative integral
//! formula and the mixed-volume identity against independent numerical
//! oracles.
//!
//! Module map:
//!
//! * [`multilinear`]: Gram volumes, Hodge star, p-products, subspace brackets
//!   and the sign-parity calculus.
//! * [`polytope`]: polytopes with face lattices, normal cones, intersections,
//!   Minkowski sums and volumes.
//! * [`spherical`]: spherical measures of polyhedral cones, projection
//!   moments, the simplex weight `mu_r` and the simplex-to-sphere Jacobian.
//! * [`curvature`]: curvature measures, intrinsic volumes, Steiner polynomial.
//! * [`mixed`]: mixed curvature measures and the mixed-volume bridge.
//! * [`translative`]: both sides of the translative integral formula.
//! * [`verify`]: the named verification suites used by the command line tool.

pub mod corpus;
pub mod curvature;
pub mod error;
pub mod mixed;
pub mod montecarlo;
pub mod multilinear;
pub mod polytope;
pub mod quadrature;
pub mod spherical;
pub mod translative;
pub mod verify;

pub use error::{Error, Result};

/// Dense real vector used throughout the crate.
pub type Vector = nalgebra::DVector<f64>;
/// Dense real matrix used throughout the crate.
pub type Matrix = nalgebra::DMatrix<f64>;

/// Convenience constructor for a [`Vector`] from a slice.
pub fn vector(coords: &[f64]) -> Vector {
    Vector::from_column_slice(coords)
}
