//! Exact-arithmetic classification of smoothing diagrams of normal-crossings
//! log symplectic structures on toric spaces, together with the associated
//! holonomicity, resonance and Poisson-cohomology invariants computed from
//! biresidue data.
//!
//! The linear algebra and polynomial engines are generic over a scalar type;
//! everything else works over the exact rational aliases below. All values
//! are immutable after construction and all operations are pure.

pub mod scalar;

pub mod matrix;
pub mod poly;
pub mod rational;

pub mod complex;
pub mod leaf;

pub mod arrangement;
pub mod diagram;

// pub mod classify;
// pub mod germ;

// pub mod golden;
// pub mod json;

/// Exact rational scalar.
pub type Q = num_rational::BigRational;
/// Dense matrix over [`Q`].
pub type QMatrix = matrix::Matrix<Q>;
/// Sparse multivariate polynomial over [`Q`].
pub type QPoly = poly::MPoly<Q>;
