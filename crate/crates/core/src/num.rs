//! Scalar abstractions shared by the numeric modules.
//!
//! Two tiers exist. [`Scalar`] only needs field arithmetic and exact integer
//! conversion, so it admits rationals (`num_rational::Ratio<i64>`) as well as
//! floats; the evaluation metrics and trend frequencies are written against
//! it. [`Real`] adds transcendental functions and is used by the samplers and
//! optimizers.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, Num, ToPrimitive};

/// Field-like number usable for exact or floating-point bookkeeping.
pub trait Scalar: Num + Clone + PartialOrd + FromPrimitive + ToPrimitive + Debug {
    /// Exact conversion of a count.
    fn from_count(n: u64) -> Self {
        Self::from_u64(n).expect("count representable in scalar type")
    }
}

impl<T> Scalar for T where T: Num + Clone + PartialOrd + FromPrimitive + ToPrimitive + Debug {}

/// Floating-point scalar for the sampler, TF-IDF and SVM code paths.
pub trait Real:
    Float
    + Scalar
    + Copy
    + Display
    + FromStr
    + Sum
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Send
    + Sync
    + 'static
{
    fn from_f64_lossy(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("finite f64 converts")
    }

    fn to_f64_lossy(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl<T> Real for T where
    T: Float
        + Scalar
        + Copy
        + Display
        + FromStr
        + Sum
        + AddAssign
        + SubAssign
        + MulAssign
        + DivAssign
        + Send
        + Sync
        + 'static
{
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    fn half<T: Scalar>() -> T {
        T::one() / T::from_count(2)
    }

    #[test]
    fn scalar_admits_floats_and_rationals() {
        assert_eq!(half::<f64>(), 0.5);
        assert_eq!(half::<f32>(), 0.5);
        assert_eq!(half::<Ratio<i64>>(), Ratio::new(1, 2));
    }

    #[test]
    fn real_roundtrips_through_f64() {
        assert_eq!(f32::from_f64_lossy(0.25).to_f64_lossy(), 0.25);
    }
}
