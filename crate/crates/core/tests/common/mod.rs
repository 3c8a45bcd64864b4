#![allow(dead_code)]

use std::collections::BTreeMap;

use hatm_core::{gamma, Expr, Fingerprint, Series, TimeFactor};

/// `Gamma(k alpha + 1)`.
pub fn g(k: u32, alpha: f64) -> f64 {
    gamma(k as f64 * alpha + 1.0).unwrap()
}

/// Published iterate formulas as `spatial * sum_k c_k t^(k alpha)`.
pub struct Expected {
    pub spatial: Expr,
    pub coefs: Vec<(u32, f64)>,
}

/// `u_1..u_3` of the presets sharing the `F(x)` pattern (4.2 to 4.5).
pub fn pattern_iterates(f: Expr, alpha: f64, h: f64) -> [Expected; 3] {
    let (g1, g2, g3) = (g(1, alpha), g(2, alpha), g(3, alpha));
    let hp = 1.0 + h;
    [
        Expected { spatial: f.clone(), coefs: vec![(1, -h / g1)] },
        Expected { spatial: f.clone(), coefs: vec![(1, -h * hp / g1), (2, h * h / g2)] },
        Expected { spatial: f, coefs: vec![(1, -h * hp * hp / g1), (2, 2.0 * h * h * hp / g2), (3, -h * h * h / g3)] },
    ]
}

/// `u_1..u_3` of preset 4.1.
pub fn iterates_41(alpha: f64, h: f64) -> [Expected; 3] {
    let g1 = g(1, alpha);
    let one = Expr::one;
    [
        Expected { spatial: one(), coefs: vec![(1, -h / g1)] },
        Expected { spatial: one(), coefs: vec![(1, -h * (h + 1.0) / g1)] },
        Expected { spatial: one(), coefs: vec![(1, -h * (h + 1.0) * (h + 1.0) / g1)] },
    ]
}

pub fn expected_for(id: &str, alpha: f64, h: f64) -> [Expected; 3] {
    let x = Expr::x;
    match id {
        "4.1" => iterates_41(alpha, h),
        "4.2" => pattern_iterates(Expr::sinh(x()), alpha, h),
        "4.3" => pattern_iterates(x() + Expr::one(), alpha, h),
        "4.4" => pattern_iterates(x(), alpha, h),
        "4.5" => pattern_iterates(Expr::powi(x(), 2), alpha, h),
        _ => unreachable!(),
    }
}

/// Largest relative mismatch between a computed series and an expected
/// formula, comparing `sum coef(alpha) * fingerprint(spatial)` per time factor.
pub fn mismatch(s: &Series, e: &Expected, alpha: f64) -> f64 {
    let mut got: BTreeMap<TimeFactor, Fingerprint<f64>> = BTreeMap::new();
    for term in s.terms() {
        let w = term.coef.evaluate(alpha).unwrap();
        let entry = got.entry(term.time).or_insert_with(Fingerprint::zeros);
        *entry = entry.axpy(w, term.spatial.fingerprint());
    }
    let mut want: BTreeMap<TimeFactor, Fingerprint<f64>> = BTreeMap::new();
    for (k, c) in &e.coefs {
        want.insert(TimeFactor::alpha_power(*k), Fingerprint::zeros().axpy(*c, e.spatial.fingerprint()));
    }
    let scale = want.values().map(|f| f.norm()).fold(0.0, f64::max).max(1e-300);
    let mut worst: f64 = 0.0;
    for key in got.keys().chain(want.keys()) {
        let zero = Fingerprint::zeros();
        let a = got.get(key).unwrap_or(&zero);
        let b = want.get(key).unwrap_or(&zero);
        let diff = a.axpy(-1.0, b).norm();
        let denom = if b.norm() > 0.0 { b.norm() } else { scale };
        worst = worst.max(diff / denom);
    }
    worst
}

pub mod strategies;

use hatm_core::Point;

/// Sum of the magnitudes of every term of `s` at `(point, t)`; the scale for
/// relative comparisons of series values.
pub fn magnitude(s: &Series, point: Point<f64>, t: f64, alpha: f64) -> f64 {
    s.terms()
        .iter()
        .map(|term| {
            let single = Series::from_terms(vec![term.clone()]);
            single.evaluate(point, t, alpha).map(f64::abs).unwrap_or(0.0)
        })
        .sum::<f64>()
        .max(1.0)
}
