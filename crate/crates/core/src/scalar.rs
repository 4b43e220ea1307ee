//! Scalar abstraction for the numeric core.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::AddAssign;

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar the closed-form theory and statistics are generic over.
///
/// Blanket-implemented for `f32` and `f64`. Everything downstream of the
/// simulation engine (RNG streams, CSV/JSON output) is pinned to `f64`.
pub trait Real:
    Float + FromPrimitive + AddAssign + Sum<Self> + Display + Debug + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float + FromPrimitive + AddAssign + Sum<Self> + Display + Debug + Send + Sync + 'static
{
}

/// Shorthand for lifting an `f64` constant into a generic scalar.
#[inline]
pub(crate) fn real<F: Real>(x: f64) -> F {
    F::from_f64(x).expect("f64 constant representable in target scalar")
}

/// Lift a vertex degree (or other small count) into a generic scalar.
#[inline]
pub(crate) fn real_usize<F: Real>(x: usize) -> F {
    F::from_usize(x).expect("small count representable in target scalar")
}
