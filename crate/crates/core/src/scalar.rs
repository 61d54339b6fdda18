//! Floating-point abstraction shared by the information measures and the
//! threshold formulas.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Scalar: Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static {
    /// Lossy conversion from a count or other primitive value.
    fn of<N: ToPrimitive>(v: N) -> Self {
        Self::from(v).expect("value representable as scalar")
    }

    fn two() -> Self {
        Self::one() + Self::one()
    }

    /// `x * log2(x)` with the `0 log 0 = 0` convention.
    fn xlog2x(self) -> Self {
        if self <= Self::zero() {
            Self::zero()
        } else {
            self * self.log2()
        }
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
