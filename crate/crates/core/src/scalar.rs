//! Floating-point scalar abstraction.
//!
//! All numerical routines are generic over [`Real`], which is implemented for
//! `f32` and `f64`. Exact quantities (Catalan numbers, Wick sums, binomial
//! identities) use arbitrary-precision integers and rationals instead.

use std::fmt::{Debug, Display};

use nalgebra::RealField;
use num_traits::ToPrimitive;

/// Real floating point type usable as a matrix entry component.
pub trait Real: RealField + ToPrimitive + Copy + Debug + Display + Send + Sync + 'static {
    /// Lossy conversion from `f64`.
    fn of(x: f64) -> Self;

    /// Lossy conversion to `f64`.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {
    fn of(x: f64) -> Self {
        x as f32
    }
}

impl Real for f64 {
    fn of(x: f64) -> Self {
        x
    }
}

/// Converts a count to the scalar type.
pub(crate) fn count<T: Real>(n: usize) -> T {
    T::of(n as f64)
}
