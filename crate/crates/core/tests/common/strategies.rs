use hatm_core::{Expr, Func, Series, TimeFactor};
use num_rational::Rational64;
use proptest::prelude::*;

/// Smooth expressions in `x` and `y` that stay finite on `[0.4, 2.5]^2`.
pub fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![Just(Expr::x()), Just(Expr::y()), (-3i32..=3).prop_map(|k| Expr::constant(k as f64 * 0.5)),];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::add),
            prop::collection::vec(inner.clone(), 2..3).prop_map(Expr::mul),
            (inner.clone(), 1i64..=3).prop_map(|(e, n)| Expr::powi(e, n)),
            inner.clone().prop_map(Expr::sinh),
            inner.clone().prop_map(Expr::cosh),
            inner.clone().prop_map(Expr::tanh),
            // positive arguments only for the singular functions
            inner.clone().prop_map(|e| Expr::coth(Expr::x() + Expr::powi(e, 2))),
            inner.clone().prop_map(|e| Expr::apply(Func::Csch, Expr::y() + Expr::powi(e, 2))),
            inner.clone().prop_map(|e| Expr::recip(Expr::constant(1.0) + Expr::powi(e, 2))),
            inner.prop_map(|e| Expr::pow(Expr::x() + Expr::powi(e, 2), Rational64::new(1, 2))),
        ]
    })
}

fn spatial_part() -> impl Strategy<Value = Expr> {
    prop_oneof![
        Just(Expr::one()),
        Just(Expr::x()),
        Just(Expr::powi(Expr::x(), 2)),
        Just(Expr::sinh(Expr::x())),
        Just(Expr::x() * Expr::y()),
        Just(Expr::cosh(Expr::y())),
    ]
}

/// Series with integer `p`, non-negative `q` and no exponential factors.
pub fn series() -> impl Strategy<Value = Series> {
    prop::collection::vec((-3.0f64..3.0, spatial_part(), 0i64..3, 0i64..4), 0..6).prop_map(|terms| {
        terms
            .into_iter()
            .map(|(w, e, p, q)| Series::term(w, e, TimeFactor::int(p, q, 0).unwrap()))
            .fold(Series::zero(), |acc, s| acc.add(&s))
    })
}

pub fn alpha() -> impl Strategy<Value = f64> {
    0.1f64..=1.0
}

pub fn coord() -> impl Strategy<Value = f64> {
    0.5f64..2.0
}

pub fn time() -> impl Strategy<Value = f64> {
    0.05f64..1.0
}
