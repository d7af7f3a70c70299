use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, NumAssign};

/// Real scalar the models are written against.
///
/// Blanket-implemented for every float satisfying the bounds, which in
/// practice means `f32` and `f64`. The acceptance tolerances (1e-12 and
/// tighter) are only meaningful for `f64`.
pub trait Real: Float + FloatConst + NumAssign + Debug + Display + Default + Send + Sync + 'static {}

impl<T> Real for T where T: Float + FloatConst + NumAssign + Debug + Display + Default + Send + Sync + 'static {}

/// Converts an `f64` literal into `T`.
#[inline]
pub(crate) fn lit<T: Real>(x: f64) -> T {
    T::from(x).expect("f64 literal representable in scalar type")
}

#[inline]
pub(crate) fn from_u64<T: Real>(n: u64) -> T {
    T::from(n).expect("integer representable in scalar type")
}

#[inline]
pub(crate) fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
