use std::cmp::Ordering;

use super::{Point, SpatialExpr};
use crate::scalar::Scalar;

/// Sample points, version 1. Every x is bounded away from zero, where
/// coth, csch and 1/x are singular.
pub const SAMPLE_POINTS: [(f64, f64); 8] = [
    (0.531, 0.733),
    (0.531, 1.414),
    (0.877, 0.733),
    (0.877, 1.414),
    (1.203, 0.733),
    (1.203, 1.414),
    (1.618, 0.733),
    (1.618, 1.414),
];

const REL_TOL: f64 = 1e-10;
const ABS_TOL: f64 = 1e-12;

/// An expression's values at [`SAMPLE_POINTS`]. A point where evaluation
/// fails records NaN, which never compares equal.
#[derive(Debug, Clone, PartialEq)]
pub struct Fingerprint<T> {
    values: [T; 8],
}

impl<T: Scalar> Fingerprint<T> {
    pub fn of(e: &SpatialExpr<T>) -> Self {
        let mut values = [T::zero(); 8];
        for (slot, (x, y)) in values.iter_mut().zip(SAMPLE_POINTS) {
            *slot = e.evaluate(Point::new(T::lit(x), T::lit(y))).unwrap_or_else(|_| T::nan());
        }
        Self { values }
    }

    pub fn values(&self) -> &[T; 8] {
        &self.values
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        let rel = T::lit(REL_TOL);
        let abs = T::lit(ABS_TOL);
        self.values.iter().zip(&other.values).all(|(a, b)| {
            let d = (*a - *b).abs();
            d <= abs || d <= rel * a.abs().max(b.abs())
        })
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn norm(&self) -> T {
        self.values.iter().map(|v| *v * *v).sum::<T>().sqrt()
    }

    pub fn dot(&self, other: &Self) -> T {
        self.values.iter().zip(&other.values).map(|(a, b)| *a * *b).sum()
    }

    /// `self + k * other`, componentwise.
    pub fn axpy(&self, k: T, other: &Self) -> Self {
        let mut values = self.values;
        for (v, o) in values.iter_mut().zip(&other.values) {
            *v = *v + k * *o;
        }
        Self { values }
    }

    pub fn zeros() -> Self {
        Self { values: [T::zero(); 8] }
    }

    pub fn lexicographic_cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.values.iter().zip(&other.values) {
            let o = a.as_f64().total_cmp(&b.as_f64());
            if o != Ordering::Equal {
                return o;
            }
        }
        Ordering::Equal
    }
}
