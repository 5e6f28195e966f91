//! Scalar abstraction: every module is generic over the working float type.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar used throughout the crate: `f32` or `f64`.
pub trait Real: Float + FromPrimitive + Debug + Display + 'static {}

impl<T> Real for T where T: Float + FromPrimitive + Debug + Display + 'static {}

/// Converts an `f64` constant into the working scalar type.
#[inline]
pub fn cast<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("constant not representable in scalar type")
}

/// Converts a count into the working scalar type.
#[inline]
pub fn cast_usize<T: Real>(n: usize) -> T {
    T::from_usize(n).expect("count not representable in scalar type")
}
