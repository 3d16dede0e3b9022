use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, NumAssign};

/// Real scalar the geometry kernel is generic over: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + NumAssign + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into this type.
    fn lit(x: f64) -> Self;

    /// Largest amount by which a quantity that is mathematically `>= 1`
    /// may fall below 1 through rounding alone.
    fn rounding_slack() -> Self;
}

impl Real for f64 {
    #[inline]
    fn lit(x: f64) -> Self {
        x
    }

    #[inline]
    fn rounding_slack() -> Self {
        1e-12
    }
}

impl Real for f32 {
    #[inline]
    fn lit(x: f64) -> Self {
        x as f32
    }

    #[inline]
    fn rounding_slack() -> Self {
        // 1e-12 is far below f32 resolution.
        1e-5
    }
}
