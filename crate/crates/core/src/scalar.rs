use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_rational::Rational64;
use num_traits::{Float, FromPrimitive, NumCast};

/// Floating point scalar the solver is generic over: `f32` or `f64`.
pub trait Scalar: Float + FromPrimitive + NumCast + Sum + Debug + Display + Default + Send + Sync + 'static {
    /// Converts a literal; every literal used in the crate is representable.
    fn lit(v: f64) -> Self {
        <Self as NumCast>::from(v).expect("literal fits the scalar type")
    }

    fn from_ratio(r: Rational64) -> Self {
        Self::lit(*r.numer() as f64) / Self::lit(*r.denom() as f64)
    }

    fn from_int(i: i64) -> Self {
        Self::lit(i as f64)
    }

    /// Smallest magnitude accepted as a divisor before a singularity is reported.
    fn division_floor() -> Self {
        Self::lit(1e-300).max(Self::min_positive_value())
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
