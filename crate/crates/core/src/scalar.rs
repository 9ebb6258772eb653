//! Real scalar abstraction so the kernel runs in `f32` or `f64`.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point type usable as the real part of an amplitude.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + LowerExp + Default + Sum + Send + Sync + 'static
{
    /// Absolute tolerance on the squared norm after an operation.
    fn norm_tolerance() -> Self;

    /// Converts an `f64` constant, panicking only for non-representable values.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 constant not representable")
    }
}

impl Scalar for f64 {
    fn norm_tolerance() -> Self {
        1e-10
    }
}

impl Scalar for f32 {
    fn norm_tolerance() -> Self {
        1e-5
    }
}
