//! Coefficients that stay symbolic in the fractional order.
//!
//! A [`Coefficient`] is a finite sum `sum_i w_i * M_i(alpha)` where every
//! [`GammaMonomial`] `M_i` is a product of powers of `Gamma(a + b*alpha)`.
//! The fractional integral and Caputo derivative only ever multiply by Gamma
//! ratios, so iterates stay exact in alpha until a value is requested.

use std::collections::BTreeMap;

use num_rational::Rational64;
use num_traits::Signed;

use crate::error::Result;
use crate::scalar::Scalar;
use crate::special::log_gamma;

/// The argument `a + b*alpha` of one Gamma factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GammaArg {
    pub a: Rational64,
    pub b: i64,
}

impl GammaArg {
    pub fn new(a: Rational64, b: i64) -> Self {
        Self { a, b }
    }

    pub fn value<T: Scalar>(&self, alpha: T) -> T {
        T::from_ratio(self.a) + T::from_int(self.b) * alpha
    }
}

/// Product of `Gamma(arg)^power`. Integer arguments with no alpha part are
/// folded into the numeric weight when the monomial is built.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GammaMonomial {
    factors: BTreeMap<GammaArg, i32>,
}

impl GammaMonomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn factors(&self) -> impl Iterator<Item = (&GammaArg, &i32)> {
        self.factors.iter()
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    /// Multiplies by `Gamma(arg)^power` and returns the numeric factor split
    /// off when `arg` is a plain positive integer.
    pub fn times<T: Scalar>(&mut self, arg: GammaArg, power: i32) -> T {
        if arg.b == 0 && arg.a.is_integer() && arg.a.is_positive() && arg.a.to_integer() <= 30 {
            let n = arg.a.to_integer();
            let factorial: f64 = (1..n).map(|k| k as f64).product();
            return T::lit(factorial).powi(power);
        }
        let entry = self.factors.entry(arg).or_insert(0);
        *entry += power;
        if *entry == 0 {
            self.factors.remove(&arg);
        }
        T::one()
    }

    pub fn product(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (arg, pow) in &other.factors {
            let entry = out.factors.entry(*arg).or_insert(0);
            *entry += *pow;
            if *entry == 0 {
                out.factors.remove(arg);
            }
        }
        out
    }

    pub fn evaluate<T: Scalar>(&self, alpha: T) -> Result<T> {
        let mut ln = T::zero();
        for (arg, pow) in &self.factors {
            ln = ln + T::from_int(*pow as i64) * log_gamma(arg.value(alpha))?;
        }
        Ok(ln.exp())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Coefficient<T> {
    parts: Vec<(GammaMonomial, T)>,
}

impl<T: Scalar> Coefficient<T> {
    pub fn zero() -> Self {
        Self { parts: Vec::new() }
    }

    pub fn constant(w: T) -> Self {
        Self::from_parts(vec![(GammaMonomial::one(), w)])
    }

    /// Sorts by monomial, merges duplicates and drops zero weights.
    pub fn from_parts(parts: Vec<(GammaMonomial, T)>) -> Self {
        let mut merged: BTreeMap<GammaMonomial, T> = BTreeMap::new();
        for (m, w) in parts {
            let e = merged.entry(m).or_insert(T::zero());
            *e = *e + w;
        }
        Self { parts: merged.into_iter().filter(|(_, w)| !w.is_zero()).collect() }
    }

    pub fn parts(&self) -> &[(GammaMonomial, T)] {
        &self.parts
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn scale(&self, k: T) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Self { parts: self.parts.iter().map(|(m, w)| (m.clone(), *w * k)).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_parts(self.parts.iter().chain(&other.parts).cloned().collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut parts = Vec::with_capacity(self.parts.len() * other.parts.len());
        for (ma, wa) in &self.parts {
            for (mb, wb) in &other.parts {
                parts.push((ma.product(mb), *wa * *wb));
            }
        }
        Self::from_parts(parts)
    }

    /// Multiplies every part by `Gamma(num) / Gamma(den)`.
    pub fn times_gamma_ratio(&self, num: GammaArg, den: GammaArg) -> Self {
        let parts = self
            .parts
            .iter()
            .map(|(m, w)| {
                let mut m = m.clone();
                let k: T = m.times::<T>(num, 1) * m.times::<T>(den, -1);
                (m, *w * k)
            })
            .collect();
        Self::from_parts(parts)
    }

    pub fn evaluate(&self, alpha: T) -> Result<T> {
        let mut acc = T::zero();
        for (m, w) in &self.parts {
            acc = acc + *w * m.evaluate(alpha)?;
        }
        Ok(acc)
    }

    /// Largest absolute weight.
    pub fn max_weight(&self) -> T {
        self.parts.iter().fold(T::zero(), |acc, (_, w)| acc.max(w.abs()))
    }
}

/// Shorthand used by the oracle tests: `Gamma(a + b*alpha)` as an argument.
pub fn gamma_arg(a: i64, b: i64) -> GammaArg {
    GammaArg::new(Rational64::from_integer(a), b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gamma;

    #[test]
    fn integer_arguments_fold_into_weight() {
        let mut m = GammaMonomial::one();
        let k: f64 = m.times(gamma_arg(5, 0), 1);
        assert_eq!(k, 24.0);
        assert!(m.is_one());
        let k: f64 = m.times(gamma_arg(1, 0), -1);
        assert_eq!(k, 1.0);
    }

    #[test]
    fn ratio_cancels_exactly() {
        let c = Coefficient::<f64>::constant(2.0)
            .times_gamma_ratio(gamma_arg(1, 1), gamma_arg(1, 2))
            .times_gamma_ratio(gamma_arg(1, 2), gamma_arg(1, 1));
        assert_eq!(c, Coefficient::constant(2.0));
    }

    #[test]
    fn evaluates_at_bound_alpha() {
        let c = Coefficient::<f64>::constant(1.0).times_gamma_ratio(gamma_arg(1, 0), gamma_arg(1, 1));
        for alpha in [0.5, 0.75, 1.0] {
            let expected = 1.0 / gamma(1.0 + alpha).unwrap();
            assert!((c.evaluate(alpha).unwrap() - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn like_monomials_merge() {
        let m = Coefficient::<f64>::constant(1.0).times_gamma_ratio(gamma_arg(1, 0), gamma_arg(1, 2));
        let sum = m.add(&m.scale(-1.0));
        assert!(sum.is_zero());
        let prod = m.mul(&Coefficient::constant(3.0));
        assert_eq!(prod.parts()[0].1, 3.0);
    }
}
