//! Scalar traits used by the simulator and the noise model.
//!
//! The state-vector code is written once against [`Real`] and instantiated for
//! `f32` and `f64`. The depolarizing/separability arithmetic only needs field
//! operations, so it is written against [`Field`] and also works with exact
//! rationals such as `num_rational::Ratio<i64>`.

use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_traits::{Float, FloatConst, FromPrimitive, Num};

/// Floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal, panicking only if the target type cannot represent
    /// finite values (never the case for `f32`/`f64`).
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    /// Converts to `f64` for reporting.
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Real for T where
    T: Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
}

/// Ordered field scalar (floats or exact rationals).
pub trait Field: Num + Neg<Output = Self> + Clone + PartialOrd + Debug {
    fn abs_val(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// `2^bits` built by repeated doubling, so it is exact for rationals.
    fn pow2(bits: u32) -> Self {
        let two = Self::one() + Self::one();
        (0..bits).fold(Self::one(), |acc, _| acc * two.clone())
    }
}

impl<T> Field for T where T: Num + Neg<Output = T> + Clone + PartialOrd + Debug {}
