//! Finite sums of separable terms `coef(alpha) * f(x, y) * t^(p + q*alpha) * e^(c*t)`.
//!
//! The Caputo derivative and the fractional integral act on the time factor
//! through the power rule, which is the operational form of multiplying by
//! `s^(+-alpha)` in the Laplace domain and transforming back.

mod coefficient;
mod json;
mod time;

use std::collections::BTreeMap;

use num_rational::Rational64;
use num_traits::One;

use crate::error::{HatmError, Result};
use crate::scalar::Scalar;
use crate::spatial::{Fingerprint, Point, SpatialExpr, Var};

pub use coefficient::{gamma_arg, Coefficient, GammaArg, GammaMonomial};
pub use json::{GammaTokenJson, SeriesJson, TermJson, TokenJson};
pub use time::TimeFactor;

/// Relative size below which a merged weight counts as cancellation residue.
const DUST_TOL: f64 = 1e-13;
/// Relative tolerance of the zero and proportionality tests on fingerprints.
const COLLAPSE_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct FracTerm<T> {
    pub coef: Coefficient<T>,
    pub spatial: SpatialExpr<T>,
    pub time: TimeFactor,
}

impl<T: Scalar> FracTerm<T> {
    pub fn new(coef: Coefficient<T>, spatial: SpatialExpr<T>, time: TimeFactor) -> Self {
        Self { coef, spatial, time }
    }
}

impl<T: Scalar> PartialEq for FracTerm<T> {
    fn eq(&self, other: &Self) -> bool {
        self.time == other.time && self.coef == other.coef && self.spatial == other.spatial
    }
}

#[derive(Debug, Clone)]
pub struct FracSeries<T> {
    terms: Vec<FracTerm<T>>,
}

impl<T: Scalar> PartialEq for FracSeries<T> {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl<T: Scalar> Default for FracSeries<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Scalar> FracSeries<T> {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    /// Builds a collected series from arbitrary terms.
    pub fn from_terms(terms: Vec<FracTerm<T>>) -> Self {
        collect_terms(terms, &[])
    }

    /// Terms taken as given; the caller guarantees they are already collected.
    pub(crate) fn from_collected(terms: Vec<FracTerm<T>>) -> Self {
        Self { terms }
    }

    /// A single term `w * spatial * time`.
    pub fn term(weight: T, spatial: SpatialExpr<T>, time: TimeFactor) -> Self {
        Self::from_terms(vec![FracTerm::new(Coefficient::constant(weight), spatial, time)])
    }

    /// A time-independent series, e.g. an initial condition.
    pub fn spatial(spatial: SpatialExpr<T>) -> Self {
        Self::term(T::one(), spatial, TimeFactor::one())
    }

    pub fn one() -> Self {
        Self::spatial(SpatialExpr::one())
    }

    pub fn terms(&self) -> &[FracTerm<T>] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn has_exponential(&self) -> bool {
        self.terms.iter().any(|t| t.time.c() != 0)
    }

    /// Distinct spatial parts, in term order.
    pub fn spatial_parts(&self) -> Vec<SpatialExpr<T>> {
        let mut out: Vec<SpatialExpr<T>> = Vec::new();
        for t in &self.terms {
            if !out.iter().any(|s| s.is_numerically_equal(&t.spatial)) {
                out.push(t.spatial.clone());
            }
        }
        out
    }

    pub fn collect(&self) -> Self {
        collect_terms(self.terms.clone(), &[])
    }

    /// Collects, preferring the given expressions when a group of terms sums
    /// to a multiple of one of them.
    pub fn collect_onto(&self, basis: &[SpatialExpr<T>]) -> Self {
        collect_terms(self.terms.clone(), basis)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::sum_of(&[self, other])
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-T::one()))
    }

    /// Collected sum of several series.
    pub fn sum_of(parts: &[&Self]) -> Self {
        let terms = parts.iter().flat_map(|s| s.terms.iter().cloned()).collect();
        collect_terms(terms, &[])
    }

    pub fn scale(&self, k: T) -> Self {
        if k == T::zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|t| FracTerm::new(t.coef.scale(k), t.spatial.clone(), t.time)).collect() }
    }

    /// Multiplies every spatial part by `e` and every time factor by `time`.
    pub fn times_factor(&self, e: &SpatialExpr<T>, time: TimeFactor) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| FracTerm::new(t.coef.clone(), e.clone() * t.spatial.clone(), t.time.product(&time)))
            .collect();
        collect_terms(terms, &[])
    }

    pub fn multiply(&self, other: &Self) -> Self {
        collect_terms(self.product_terms(other), &[])
    }

    /// Uncollected termwise products.
    pub(crate) fn product_terms(&self, other: &Self) -> Vec<FracTerm<T>> {
        let mut terms = Vec::with_capacity(self.len() * other.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(FracTerm::new(
                    a.coef.mul(&b.coef),
                    a.spatial.clone() * b.spatial.clone(),
                    a.time.product(&b.time),
                ));
            }
        }
        terms
    }

    pub fn spatial_derivative(&self, v: Var, order: u8) -> Result<Self> {
        if !(1..=2).contains(&order) {
            return Err(HatmError::DerivativeOrder(order));
        }
        let (dx, dy) = match v {
            Var::X => (order, 0),
            Var::Y => (0, order),
        };
        Ok(self.derivative(dx, dy))
    }

    /// `d^dx/dx^dx d^dy/dy^dy` applied termwise.
    pub fn derivative(&self, dx: u8, dy: u8) -> Self {
        if dx == 0 && dy == 0 {
            return self.clone();
        }
        let terms = self
            .terms
            .iter()
            .map(|t| FracTerm::new(t.coef.clone(), t.spatial.differentiate_multi(dx, dy), t.time))
            .collect();
        collect_terms(terms, &[])
    }

    fn require_no_exponential(&self) -> Result<()> {
        match self.terms.iter().find(|t| t.time.c() != 0) {
            Some(t) => Err(HatmError::ExponentialTerm(t.time.c())),
            None => Ok(()),
        }
    }

    /// Caputo derivative of order alpha, with alpha kept symbolic:
    /// `t^g -> Gamma(1+g)/Gamma(1+g-alpha) t^(g-alpha)`, constants map to zero.
    pub fn caputo_derivative(&self) -> Result<Self> {
        self.require_no_exponential()?;
        let mut terms = Vec::with_capacity(self.len());
        for t in &self.terms {
            if t.time.is_constant() {
                continue;
            }
            let time = t.time.shifted(0, -1)?;
            let coef = t.coef.times_gamma_ratio(
                GammaArg::new(t.time.p() + Rational64::one(), t.time.q()),
                GammaArg::new(time.p() + Rational64::one(), time.q()),
            );
            terms.push(FracTerm::new(coef, t.spatial.clone(), time));
        }
        Ok(collect_terms(terms, &[]))
    }

    /// Riemann-Liouville integral of order alpha:
    /// `t^g -> Gamma(1+g)/Gamma(1+g+alpha) t^(g+alpha)`.
    pub fn frac_integral(&self) -> Result<Self> {
        self.require_no_exponential()?;
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let time = t.time.shifted(0, 1)?;
                let coef = t.coef.times_gamma_ratio(
                    GammaArg::new(t.time.p() + Rational64::one(), t.time.q()),
                    GammaArg::new(time.p() + Rational64::one(), time.q()),
                );
                Ok(FracTerm::new(coef, t.spatial.clone(), time))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(collect_terms(terms, &[]))
    }

    /// Replaces every `e^(ct)` factor by its Maclaurin polynomial with
    /// `n_terms` terms.
    pub fn taylor_expand(&self, n_terms: usize) -> Result<Self> {
        if n_terms == 0 {
            return Err(HatmError::TaylorTerms);
        }
        if !self.has_exponential() {
            return Ok(self.clone());
        }
        let mut terms = Vec::new();
        for t in &self.terms {
            let c = t.time.c();
            if c == 0 {
                terms.push(t.clone());
                continue;
            }
            let mut k = T::one();
            for j in 0..n_terms {
                if j > 0 {
                    k = k * T::from_int(c) / T::from_int(j as i64);
                }
                let time = t.time.with_rate(0).shifted(j as i64, 0)?;
                terms.push(FracTerm::new(t.coef.scale(k), t.spatial.clone(), time));
            }
        }
        Ok(collect_terms(terms, &[]))
    }

    /// Binds alpha, evaluating every coefficient and exponent once.
    pub fn bind(&self, alpha: T) -> Result<BoundSeries<T>> {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let exponent = t.time.exponent(alpha);
                if exponent < T::zero() {
                    return Err(HatmError::NegativeExponent(format!("{}", t.time)));
                }
                Ok(BoundTerm {
                    coef: t.coef.evaluate(alpha)?,
                    spatial: t.spatial.clone(),
                    exponent,
                    rate: T::from_int(t.time.c()),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BoundSeries { terms })
    }

    pub fn evaluate(&self, point: Point<T>, t: T, alpha: T) -> Result<T> {
        self.bind(alpha)?.evaluate(point, t)
    }
}

#[derive(Debug, Clone)]
struct BoundTerm<T> {
    coef: T,
    spatial: SpatialExpr<T>,
    exponent: T,
    rate: T,
}

/// A series with alpha fixed; cheap to evaluate on grids.
#[derive(Debug, Clone)]
pub struct BoundSeries<T> {
    terms: Vec<BoundTerm<T>>,
}

impl<T: Scalar> BoundSeries<T> {
    /// `0^0` is taken as 1, so `t = 0` returns the time-independent part.
    pub fn evaluate(&self, point: Point<T>, t: T) -> Result<T> {
        if t < T::zero() || !t.is_finite() {
            return Err(HatmError::Domain { function: "series time", value: t.as_f64() });
        }
        let mut acc = T::zero();
        for term in &self.terms {
            let time = if term.exponent == T::zero() { T::one() } else { t.powf(term.exponent) };
            let exp = if term.rate == T::zero() { T::one() } else { (term.rate * t).exp() };
            acc = acc + term.coef * term.spatial.evaluate(point)? * time * exp;
        }
        Ok(acc)
    }
}

struct Atom<T> {
    weight: T,
    mass: T,
    spatial: SpatialExpr<T>,
}

/// Merges like terms.
///
/// Terms are split into atoms `weight * monomial * spatial * time` and grouped
/// by `(time, monomial)`. Within a group, fingerprint-equal spatial parts are
/// merged and weights that cancel to dust are dropped. A group whose weighted
/// sum is zero on the sample points is dropped; a group whose sum is a
/// multiple of a basis expression or of one of its own subexpressions is
/// replaced by that multiple. Atoms are then regrouped into terms by
/// `(time, spatial)` and sorted by `(q, p, c)` and fingerprint.
fn collect_terms<T: Scalar>(terms: Vec<FracTerm<T>>, basis: &[SpatialExpr<T>]) -> FracSeries<T> {
    let mut groups: BTreeMap<(TimeFactor, GammaMonomial), Vec<Atom<T>>> = BTreeMap::new();
    for term in terms {
        if term.spatial.is_zero() {
            continue;
        }
        for (m, w) in term.coef.parts() {
            groups.entry((term.time, m.clone())).or_default().push(Atom {
                weight: *w,
                mass: w.abs(),
                spatial: term.spatial.clone(),
            });
        }
    }

    let dust = T::lit(DUST_TOL);
    let mut out: Vec<FracTerm<T>> = Vec::new();
    for ((time, monomial), atoms) in groups {
        let mut merged: Vec<Atom<T>> = Vec::with_capacity(atoms.len());
        for atom in atoms {
            match merged.iter_mut().find(|m| m.spatial.is_numerically_equal(&atom.spatial)) {
                Some(m) => {
                    m.weight = m.weight + atom.weight;
                    m.mass = m.mass + atom.mass;
                    if atom.spatial.size() < m.spatial.size() {
                        m.spatial = atom.spatial;
                    }
                }
                None => merged.push(atom),
            }
        }
        merged.retain(|a| a.weight.abs() > dust * a.mass && a.spatial.fingerprint().norm() != T::zero());
        if merged.len() >= 2 {
            if let Some(collapsed) = collapse_group(&merged, basis) {
                merged = collapsed;
            }
        }
        for atom in merged {
            let part = Coefficient::from_parts(vec![(monomial.clone(), atom.weight)]);
            match out.iter_mut().find(|t| t.time == time && t.spatial.is_numerically_equal(&atom.spatial)) {
                Some(t) => t.coef = t.coef.add(&part),
                None => out.push(FracTerm::new(part, atom.spatial, time)),
            }
        }
    }
    out.retain(|t| !t.coef.is_zero());
    out.sort_by(|a, b| a.time.cmp(&b.time).then_with(|| a.spatial.fingerprint_cmp(&b.spatial)));
    FracSeries { terms: out }
}

fn collapse_group<T: Scalar>(atoms: &[Atom<T>], basis: &[SpatialExpr<T>]) -> Option<Vec<Atom<T>>> {
    let tol = T::lit(COLLAPSE_TOL);
    let mut sum = Fingerprint::zeros();
    let mut scale = T::zero();
    for a in atoms {
        let fp = a.spatial.fingerprint();
        if !fp.is_finite() {
            return None;
        }
        sum = sum.axpy(a.weight, fp);
        scale = scale + a.weight.abs() * fp.norm();
    }
    let mass = atoms.iter().map(|a| a.mass).sum::<T>();
    let sum_norm = sum.norm();
    if sum_norm <= tol * scale {
        return Some(Vec::new());
    }

    let mut candidates: Vec<SpatialExpr<T>> = basis.to_vec();
    let mut subs: Vec<SpatialExpr<T>> = atoms.iter().flat_map(|a| a.spatial.subexpressions()).collect();
    subs.sort_by_key(|s| s.size());
    candidates.extend(subs);

    for cand in candidates {
        let fp = cand.fingerprint();
        if !fp.is_finite() {
            continue;
        }
        let nn = fp.dot(fp);
        if nn == T::zero() {
            continue;
        }
        let lambda = sum.dot(fp) / nn;
        let residual = sum.axpy(-lambda, fp).norm();
        if residual <= tol * sum_norm {
            let (weight, spatial) = match cand.as_constant() {
                Some(c) => (lambda * c, SpatialExpr::one()),
                None => (lambda, cand),
            };
            return Some(vec![Atom { weight, mass, spatial }]);
        }
    }
    None
}
