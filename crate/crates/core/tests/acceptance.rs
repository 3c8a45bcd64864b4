//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::strategies::{alpha, coord, expr, series, time};
use common::{expected_for, g, magnitude, mismatch};
use hatm_core::{
    mittag_leffler, oracle, partial_sum, preset, residual, run, Config, Expr, MLParams, Point, Probe, Problem, Result,
    Series, TimeFactor, Var,
};
use proptest::prelude::*;
use proptest::test_runner::{Config as RunnerConfig, TestRunner};

struct Outcome {
    pass: bool,
    detail: String,
}

fn config(alpha: f64, hbar: f64, order: usize) -> Config {
    Config::new(alpha, hbar, order).unwrap()
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// u_1..u_3 of 4.1, 4.3, 4.4, 4.5 against their closed forms.
fn iterate_regression() -> Result<Outcome> {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for id in ["4.1", "4.3", "4.4", "4.5"] {
        let p: Problem = preset(id)?;
        for a in [0.5, 0.75, 1.0] {
            for h in [-1.0, -0.7] {
                let iterates = run(&p, &config(a, h, 3))?;
                for (m, want) in expected_for(id, a, h).iter().enumerate() {
                    worst = worst.max(mismatch(&iterates[m + 1], want, a));
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Ok(Outcome {
        pass: worst < 1e-10 && secs < 5.0,
        detail: format!("max rel err {worst:.2e} (tol 1e-10), {secs:.3} s (limit 5 s)"),
    })
}

/// 4.2 at hbar = -1: u_m = sinh(x) t^(m alpha) / Gamma(m alpha + 1).
fn sinh_collapse() -> Result<Outcome> {
    let p: Problem = preset("4.2")?;
    let f = Expr::sinh(Expr::x());
    let mut worst: f64 = 0.0;
    for a in [0.5, 1.0] {
        let iterates = run(&p, &config(a, -1.0, 5))?;
        for (m, u) in iterates.iter().enumerate() {
            let want = common::Expected { spatial: f.clone(), coefs: vec![(m as u32, 1.0 / g(m as u32, a))] };
            worst = worst.max(mismatch(u, &want, a));
            let single = u.len() == 1 && u.terms()[0].time == TimeFactor::alpha_power(m as u32);
            if !single {
                worst = f64::INFINITY;
            }
        }
    }
    Ok(Outcome { pass: worst < 1e-10, detail: format!("max rel err {worst:.2e} (tol 1e-10), m <= 5") })
}

/// Closed forms at alpha = 1, hbar = -1, order 15 on a 5x5 grid.
fn closed_forms() -> Result<Outcome> {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for id in ["4.1", "4.2", "4.3", "4.4", "4.5"] {
        let p: Problem = preset(id)?;
        let s = partial_sum(&run(&p, &config(1.0, -1.0, 15))?, 15)?;
        let bound = s.bind(1.0)?;
        for x in linspace(0.5, 2.0, 5) {
            for t in linspace(0.0, 1.0, 5) {
                let pt = Point::new(x, 1.0);
                worst = worst.max((bound.evaluate(pt, t)? - oracle(id, pt, t, 1.0)?).abs());
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Ok(Outcome {
        pass: worst < 1e-8 && secs < 10.0,
        detail: format!("max abs err {worst:.2e} (tol 1e-8), {secs:.3} s (limit 10 s)"),
    })
}

/// Order-25 partial sums at alpha in {0.5, 0.75} against the Mittag-Leffler forms.
fn fractional_oracle() -> Result<Outcome> {
    let mut worst_ml: f64 = 0.0;
    let mut worst_41: f64 = 0.0;
    for a in [0.5, 0.75] {
        for id in ["4.1", "4.2", "4.3", "4.4"] {
            let p: Problem = preset(id)?;
            let bound = partial_sum(&run(&p, &config(a, -1.0, 25))?, 25)?.bind(a)?;
            for x in linspace(0.5, 2.0, 5) {
                for t in linspace(0.0, 1.0, 11) {
                    let pt = Point::new(x, 1.0);
                    let err = (bound.evaluate(pt, t)? - oracle(id, pt, t, a)?).abs();
                    if id == "4.1" {
                        worst_41 = worst_41.max(err);
                    } else {
                        worst_ml = worst_ml.max(err);
                    }
                }
            }
        }
    }
    // the oracle itself must agree with a direct series evaluation
    let direct: f64 = (0..60).map(|k| 0.5_f64.powf(0.5 * k as f64) / g(k, 0.5)).sum();
    let ml = mittag_leffler(MLParams::classic(0.5)?, 0.5_f64.sqrt())?;
    let oracle_ok = (direct - ml).abs() < 1e-14;
    Ok(Outcome {
        pass: worst_ml < 1e-8 && worst_41 < 1e-12 && oracle_ok,
        detail: format!("4.2-4.4 max abs err {worst_ml:.2e} (tol 1e-8), 4.1 {worst_41:.2e} (tol 1e-12)"),
    })
}

/// Full nonlinear residual of 4.5 at (x = 1, t = 0.3) over increasing order.
fn residual_decrease() -> Result<Outcome> {
    let p: Problem = preset("4.5")?;
    let cfg = config(1.0, -1.0, 12);
    let iterates = run(&p, &cfg)?;
    let probe = [Probe::new(1.0, 0.0, 0.3)];
    let mut values = Vec::new();
    for m in [2, 4, 8, 12] {
        values.push(residual(&p, &partial_sum(&iterates, m)?, &cfg, &probe)?[0]);
    }
    let strictly = values.windows(2).all(|w| w[1] < w[0]);
    let last = *values.last().unwrap();
    Ok(Outcome {
        pass: strictly && last < 1e-6,
        detail: format!(
            "residuals {} (strictly decreasing: {strictly}, final tol 1e-6)",
            values.iter().map(|v| format!("{v:.2e}")).collect::<Vec<_>>().join(", ")
        ),
    })
}

/// Property suites with a fixed-seed runner, 100 cases each.
fn property_suites() -> Result<Outcome> {
    let runner = || {
        TestRunner::new_with_rng(
            RunnerConfig { cases: 100, failure_persistence: None, ..RunnerConfig::default() },
            proptest::test_runner::TestRng::deterministic_rng(proptest::test_runner::RngAlgorithm::ChaCha),
        )
    };
    let mut failures = Vec::new();
    let mut check = |name: &str, r: std::result::Result<(), String>| {
        if let Err(e) = r {
            failures.push(format!("{name}: {e}"));
        }
    };

    let r = runner().run(&(series(), alpha(), coord(), coord(), time()), |(s, a, x, y, t)| {
        let p = Point::new(x, y);
        let back = s.frac_integral().unwrap().caputo_derivative().unwrap();
        let err = (back.evaluate(p, t, a).unwrap() - s.evaluate(p, t, a).unwrap()).abs();
        prop_assert!(err <= 1e-12 * magnitude(&s, p, t, a));
        Ok(())
    });
    check("round trip", r.map_err(|e| e.to_string()));

    let r = runner().run(&(series(), series(), -2.0f64..2.0, alpha(), coord(), time()), |(s1, s2, k, a, x, t)| {
        let p = Point::x(x);
        let lhs = s1.scale(k).add(&s2).caputo_derivative().unwrap();
        let rhs = s1.caputo_derivative().unwrap().scale(k).add(&s2.caputo_derivative().unwrap());
        let err = (lhs.evaluate(p, t, a).unwrap() - rhs.evaluate(p, t, a).unwrap()).abs();
        prop_assert!(err <= 1e-12 * magnitude(&rhs, p, t, a).max(magnitude(&lhs, p, t, a)));
        Ok(())
    });
    check("linearity", r.map_err(|e| e.to_string()));

    let r = runner().run(&(expr(), 0.6f64..2.2, 0.6f64..2.2), |(e, x, y)| {
        let p = Point::new(x, y);
        let Ok(v) = e.evaluate(p) else { return Ok(()) };
        if v.abs() > 1e6 {
            return Ok(());
        }
        let h = 1e-5;
        let exact = e.differentiate(Var::X).evaluate(p).unwrap();
        let fd = (e.evaluate(Point::new(x + h, y)).unwrap() - e.evaluate(Point::new(x - h, y)).unwrap()) / (2.0 * h);
        prop_assert!((exact - fd).abs() <= 1e-6 * exact.abs().max(1.0));
        Ok(())
    });
    check("finite differences", r.map_err(|e| e.to_string()));

    let r = runner().run(&(series(), series(), alpha(), coord(), time()), |(s1, s2, a, x, t)| {
        let p = Point::x(x);
        let prod = s1.multiply(&s2).evaluate(p, t, a).unwrap();
        let want = s1.evaluate(p, t, a).unwrap() * s2.evaluate(p, t, a).unwrap();
        prop_assert!((prod - want).abs() <= 1e-10 * magnitude(&s1, p, t, a) * magnitude(&s2, p, t, a));
        Ok(())
    });
    check("product", r.map_err(|e| e.to_string()));

    let r = runner().run(&(series(), series()), |(s1, s2)| {
        let once = s1.multiply(&s2).add(&s1).collect();
        prop_assert_eq!(once.collect(), once);
        Ok(())
    });
    check("collect idempotence", r.map_err(|e| e.to_string()));

    let r = runner().run(&(series(), series()), |(s1, s2)| {
        let build = || s1.multiply(&s2).frac_integral().unwrap().to_json_string();
        prop_assert_eq!(build(), build());
        let back = Series::from_json_str(&build()).unwrap();
        prop_assert_eq!(back.to_json_string(), build());
        Ok(())
    });
    check("serialization", r.map_err(|e| e.to_string()));

    let pass = failures.is_empty();
    let detail = if pass {
        "round trip, linearity, finite differences, product, collect, serialization: 100 cases each".into()
    } else {
        failures.join("; ")
    };
    Ok(Outcome { pass, detail })
}

type Criterion = (&'static str, fn() -> Result<Outcome>);

fn main() -> ExitCode {
    let criteria: [Criterion; 6] = [
        ("iterate regression", iterate_regression),
        ("4.2 derived collapse", sinh_collapse),
        ("closed forms at alpha = 1", closed_forms),
        ("fractional oracle", fractional_oracle),
        ("residual decrease", residual_decrease),
        ("property suites", property_suites),
    ];
    let mut all = true;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = f().unwrap_or_else(|e| Outcome { pass: false, detail: format!("error: {e}") });
        all &= outcome.pass;
        println!("criterion {}: {} - {name}: {}", i + 1, if outcome.pass { "PASS" } else { "FAIL" }, outcome.detail);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
