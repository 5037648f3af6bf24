//! Scalar traits for the generic linear algebra and polynomial engines.
//!
//! The engine is written against minimal `num_traits` bounds so it can be
//! instantiated with any commutative ring or field type; the rest of the
//! crate uses the exact rational aliases from the crate root.

use std::fmt::Debug;
use std::ops::{Div, Neg, Sub};

use num_traits::{One, Zero};

/// Commutative ring scalar: enough for matrix arithmetic and Pfaffian
/// expansion (no division).
pub trait Scalar:
    Clone + Debug + PartialEq + Zero + One + Neg<Output = Self> + Sub<Output = Self>
{
}

impl<T> Scalar for T where
    T: Clone + Debug + PartialEq + Zero + One + Neg<Output = T> + Sub<Output = T>
{
}

/// Field scalar: adds exact division, enabling elimination, kernels and
/// inverses.
pub trait FieldScalar: Scalar + Div<Output = Self> {}

impl<T> FieldScalar for T where T: Scalar + Div<Output = T> {}
