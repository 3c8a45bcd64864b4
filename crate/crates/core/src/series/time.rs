use std::cmp::Ordering;
use std::fmt;

use num_rational::Rational64;
use num_traits::{Signed, Zero};

use crate::error::{HatmError, Result};
use crate::scalar::Scalar;

/// The time dependence `t^(p + q*alpha) * e^(c*t)` of a series term.
///
/// `p + q*alpha` must be non-negative for every `alpha` in `(0, 1]`, so a
/// negative `q` needs `p >= |q|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TimeFactor {
    p: Rational64,
    q: i64,
    c: i64,
}

impl TimeFactor {
    pub fn new(p: Rational64, q: i64, c: i64) -> Result<Self> {
        let tf = Self { p, q, c };
        if tf.is_valid() {
            Ok(tf)
        } else {
            Err(HatmError::NegativeExponent(tf.exponent_string()))
        }
    }

    pub fn int(p: i64, q: i64, c: i64) -> Result<Self> {
        Self::new(Rational64::from_integer(p), q, c)
    }

    pub const fn one() -> Self {
        Self { p: Rational64::new_raw(0, 1), q: 0, c: 0 }
    }

    /// `t^(q*alpha)`.
    pub fn alpha_power(q: u32) -> Self {
        Self { p: Rational64::zero(), q: q as i64, c: 0 }
    }

    fn is_valid(&self) -> bool {
        !self.p.is_negative() && (self.q >= 0 || self.p >= Rational64::from_integer(-self.q))
    }

    pub fn p(&self) -> Rational64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn c(&self) -> i64 {
        self.c
    }

    pub fn is_constant(&self) -> bool {
        self.p.is_zero() && self.q == 0 && self.c == 0
    }

    pub fn exponent<T: Scalar>(&self, alpha: T) -> T {
        T::from_ratio(self.p) + T::from_int(self.q) * alpha
    }

    pub fn product(&self, other: &Self) -> Self {
        Self { p: self.p + other.p, q: self.q + other.q, c: self.c + other.c }
    }

    /// Same powers with the exponential rate replaced.
    pub fn with_rate(&self, c: i64) -> Self {
        Self { c, ..*self }
    }

    pub(crate) fn shifted(&self, dp: i64, dq: i64) -> Result<Self> {
        Self::new(self.p + Rational64::from_integer(dp), self.q + dq, self.c)
    }

    fn exponent_string(&self) -> String {
        format!("{} + {}*alpha", self.p, self.q)
    }
}

impl Default for TimeFactor {
    fn default() -> Self {
        Self::one()
    }
}

impl Ord for TimeFactor {
    /// Ordered by `(q, p, c)`.
    fn cmp(&self, other: &Self) -> Ordering {
        (self.q, self.p, self.c).cmp(&(other.q, other.p, other.c))
    }
}

impl PartialOrd for TimeFactor {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for TimeFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t^({} + {}a)", self.p, self.q)?;
        if self.c != 0 {
            write!(f, " e^({}t)", self.c)?;
        }
        Ok(())
    }
}
