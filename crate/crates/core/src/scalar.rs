//! Scalar abstractions.
//!
//! [`Real`] is the floating-point type used for exponential sums, grids and
//! quadrature. [`Exponent`] is the field the exponent algebra is carried out
//! in: a rational type keeps every identity exact, `f64` gives a quick
//! approximate route.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::AddAssign;

use num_traits::{Float, FloatConst, FromPrimitive, Num, Signed, ToPrimitive};
use rustfft::FftNum;

/// Floating-point scalar used by all numerical routines (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FftNum + FromPrimitive + ToPrimitive + AddAssign + Sum + Display
{
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable")
    }

    #[inline]
    fn from_count(n: u64) -> Self {
        Self::from_u64(n).expect("count representable")
    }
}

impl<T> Real for T where
    T: Float + FloatConst + FftNum + FromPrimitive + ToPrimitive + AddAssign + Sum + Display
{
}

/// Field in which exponent formulas are evaluated.
pub trait Exponent:
    Clone + Num + Signed + PartialOrd + ToPrimitive + FromPrimitive + Debug + Display + Send + Sync
{
    #[inline]
    fn int(n: i64) -> Self {
        Self::from_i64(n).expect("small integer representable")
    }

    #[inline]
    fn ratio(n: i64, d: i64) -> Self {
        Self::int(n) / Self::int(d)
    }

    /// Lossy conversion for the numerical side.
    #[inline]
    fn approx(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Exponent for T where
    T: Clone + Num + Signed + PartialOrd + ToPrimitive + FromPrimitive + Debug + Display + Send + Sync
{
}
