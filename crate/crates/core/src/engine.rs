//! The deformation recursion.
//!
//! With `H = 1` every iterate follows from
//!
//! ```text
//! u_m = chi_m u_{m-1} + hbar * ( u_{m-1} - (1 - chi_m) u_0 - J^alpha[ N_{m-1} + (1 - chi_m) g ] )
//! ```
//!
//! where `N_{m-1}` is the right-hand-side operator evaluated on the homotopy
//! history: linear monomials act on `u_{m-1}`, quadratic monomials on the
//! convolution `sum_k u_{m-1-k} u_k`. The Laplace transform is never
//! materialized; `J^alpha` is the series-level fractional integral.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{HatmError, Result};
use crate::scalar::Scalar;
use crate::series::{FracSeries, FracTerm, TimeFactor};
use crate::spatial::{Point, SpatialExpr};

/// Partial derivative orders with respect to `x` and `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct MultiIndex {
    pub dx: u8,
    pub dy: u8,
}

impl MultiIndex {
    pub const NONE: Self = Self { dx: 0, dy: 0 };
    pub const X: Self = Self { dx: 1, dy: 0 };
    pub const Y: Self = Self { dx: 0, dy: 1 };
    pub const XX: Self = Self { dx: 2, dy: 0 };
    pub const XY: Self = Self { dx: 1, dy: 1 };
    pub const YY: Self = Self { dx: 0, dy: 2 };

    pub fn new(dx: u8, dy: u8) -> Self {
        Self { dx, dy }
    }

    pub fn order(&self) -> u8 {
        self.dx + self.dy
    }

    pub fn plus(&self, other: Self) -> Self {
        Self { dx: self.dx + other.dx, dy: self.dy + other.dy }
    }
}

/// `coef(x, y) * e^(exp_rate t) * D^deriv u`.
#[derive(Debug, Clone)]
pub struct LinearMonomial<T> {
    pub coef: SpatialExpr<T>,
    pub exp_rate: i64,
    pub deriv: MultiIndex,
}

/// `coef(x, y) * e^(exp_rate t) * (D^deriv_a u) (D^deriv_b u)`.
#[derive(Debug, Clone)]
pub struct QuadraticMonomial<T> {
    pub coef: SpatialExpr<T>,
    pub exp_rate: i64,
    pub deriv_a: MultiIndex,
    pub deriv_b: MultiIndex,
}

/// `D_t^alpha u = sum(linear) + sum(quadratic) + g`, `u(x, 0) = f`.
#[derive(Debug, Clone)]
pub struct ProblemSpec<T> {
    dim: u8,
    linear: Vec<LinearMonomial<T>>,
    quadratic: Vec<QuadraticMonomial<T>>,
    initial: SpatialExpr<T>,
    source: FracSeries<T>,
}

impl<T: Scalar> ProblemSpec<T> {
    pub fn new(
        dim: u8,
        linear: Vec<LinearMonomial<T>>,
        quadratic: Vec<QuadraticMonomial<T>>,
        initial: SpatialExpr<T>,
        source: FracSeries<T>,
    ) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(HatmError::Problem(format!("dimension {dim} not supported")));
        }
        let check = |d: MultiIndex| -> Result<()> {
            if d.order() > 2 {
                return Err(HatmError::Problem(format!("derivative order {} exceeds 2", d.order())));
            }
            if dim == 1 && d.dy > 0 {
                return Err(HatmError::Problem("y-derivative in a one-dimensional problem".into()));
            }
            Ok(())
        };
        for l in &linear {
            check(l.deriv)?;
        }
        for q in &quadratic {
            check(q.deriv_a)?;
            check(q.deriv_b)?;
        }
        Ok(Self { dim, linear, quadratic, initial, source })
    }

    pub fn dim(&self) -> u8 {
        self.dim
    }

    pub fn linear(&self) -> &[LinearMonomial<T>] {
        &self.linear
    }

    pub fn quadratic(&self) -> &[QuadraticMonomial<T>] {
        &self.quadratic
    }

    pub fn initial(&self) -> &SpatialExpr<T> {
        &self.initial
    }

    pub fn source(&self) -> &FracSeries<T> {
        &self.source
    }

    pub fn with_source(mut self, source: FracSeries<T>) -> Self {
        self.source = source;
        self
    }

    pub fn is_linear(&self) -> bool {
        self.quadratic.is_empty()
    }

    /// Preferred spatial forms when collecting operator output.
    fn basis(&self) -> Vec<SpatialExpr<T>> {
        vec![self.initial.clone()]
    }
}

/// The auxiliary function `H(x, t)`; only the constant 1 is supported.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum AuxFunction {
    Unit,
    Constant(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HatmConfig<T> {
    pub alpha: T,
    pub hbar: T,
    pub order: usize,
    pub taylor_terms: usize,
    pub aux_function: AuxFunction,
}

impl<T: Scalar> HatmConfig<T> {
    pub fn new(alpha: T, hbar: T, order: usize) -> Result<Self> {
        let cfg = Self { alpha, hbar, order, taylor_terms: 12, aux_function: AuxFunction::Unit };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_taylor_terms(mut self, n: usize) -> Result<Self> {
        self.taylor_terms = n;
        self.validate()?;
        Ok(self)
    }

    pub fn with_hbar(mut self, hbar: T) -> Result<Self> {
        self.hbar = hbar;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > T::zero() && self.alpha <= T::one()) {
            return Err(HatmError::Config(format!("alpha = {} must lie in (0, 1]", self.alpha)));
        }
        if self.hbar == T::zero() || !self.hbar.is_finite() {
            return Err(HatmError::Config(format!("hbar = {} must be finite and non-zero", self.hbar)));
        }
        if self.taylor_terms == 0 {
            return Err(HatmError::Config("taylor_terms must be positive".into()));
        }
        match self.aux_function {
            AuxFunction::Unit => Ok(()),
            AuxFunction::Constant(1.0) => Ok(()),
            AuxFunction::Constant(c) => {
                Err(HatmError::Config(format!("auxiliary function H = {c} not supported, only H = 1")))
            }
        }
    }
}

/// `0` for `m <= 1`, `1` otherwise.
pub fn chi(m: usize) -> u8 {
    u8::from(m > 1)
}

/// Recorded whenever `e^(ct)` factors survive in the forcing and are
/// replaced by their Maclaurin polynomials before integration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaylorEvent {
    pub m: usize,
    pub exponential_terms: usize,
    pub taylor_terms: usize,
}

#[derive(Debug, Clone)]
pub struct HatmRun<T> {
    pub iterates: Vec<FracSeries<T>>,
    pub taylor_events: Vec<TaylorEvent>,
}

fn rate_factor(c: i64) -> TimeFactor {
    TimeFactor::int(0, 0, c).expect("pure exponential factor is valid")
}

fn push_scaled<T: Scalar>(out: &mut Vec<FracTerm<T>>, terms: &[FracTerm<T>], coef: &SpatialExpr<T>, rate: i64) {
    let factor = rate_factor(rate);
    for t in terms {
        out.push(FracTerm::new(t.coef.clone(), coef.clone() * t.spatial.clone(), t.time.product(&factor)));
    }
}

/// Operator terms for iterate `m`: linear monomials on `u_{m-1}`, quadratic
/// monomials on the homotopy convolution `sum_{k<m} D^a u_{m-1-k} D^b u_k`.
pub fn apply_operator<T: Scalar>(p: &ProblemSpec<T>, history: &[FracSeries<T>], m: usize) -> Result<FracSeries<T>> {
    if m == 0 || history.len() < m {
        return Err(HatmError::Index { index: m, len: history.len() });
    }
    let mut cache: HashMap<(usize, MultiIndex), FracSeries<T>> = HashMap::new();
    let mut deriv = |k: usize, d: MultiIndex| -> FracSeries<T> {
        cache.entry((k, d)).or_insert_with(|| history[k].derivative(d.dx, d.dy)).clone()
    };
    let mut raw = Vec::new();
    for lm in &p.linear {
        let d = deriv(m - 1, lm.deriv);
        push_scaled(&mut raw, d.terms(), &lm.coef, lm.exp_rate);
    }
    for qm in &p.quadratic {
        for k in 0..m {
            let a = deriv(m - 1 - k, qm.deriv_a);
            let b = deriv(k, qm.deriv_b);
            push_scaled(&mut raw, &a.product_terms(&b), &qm.coef, qm.exp_rate);
        }
    }
    Ok(FracSeries::from_collected(raw).collect_onto(&p.basis()))
}

/// The full operator on a single function `s` (no homotopy convolution).
pub fn apply_operator_full<T: Scalar>(p: &ProblemSpec<T>, s: &FracSeries<T>) -> FracSeries<T> {
    let mut raw = Vec::new();
    for lm in &p.linear {
        push_scaled(&mut raw, s.derivative(lm.deriv.dx, lm.deriv.dy).terms(), &lm.coef, lm.exp_rate);
    }
    for qm in &p.quadratic {
        let a = s.derivative(qm.deriv_a.dx, qm.deriv_a.dy);
        let b = s.derivative(qm.deriv_b.dx, qm.deriv_b.dy);
        push_scaled(&mut raw, &a.product_terms(&b), &qm.coef, qm.exp_rate);
    }
    FracSeries::from_collected(raw).collect_onto(&p.basis())
}

fn build_rm_with_event<T: Scalar>(
    p: &ProblemSpec<T>,
    cfg: &HatmConfig<T>,
    history: &[FracSeries<T>],
    m: usize,
) -> Result<(FracSeries<T>, Option<TaylorEvent>)> {
    if m == 0 || history.len() != m {
        return Err(HatmError::Index { index: m, len: history.len() });
    }
    let first = chi(m) == 0;
    let mut forcing = apply_operator(p, history, m)?;
    if first {
        forcing = forcing.add(&p.source);
    }
    let mut event = None;
    if forcing.has_exponential() {
        event = Some(TaylorEvent {
            m,
            exponential_terms: forcing.terms().iter().filter(|t| t.time.c() != 0).count(),
            taylor_terms: cfg.taylor_terms,
        });
        forcing = forcing.taylor_expand(cfg.taylor_terms)?;
    }
    let integrated = forcing.frac_integral()?;
    let mut rm = history[m - 1].sub(&integrated);
    if first {
        rm = rm.sub(&history[0]);
    }
    Ok((rm.collect_onto(&p.basis()), event))
}

/// Time-domain form of `R_m`:
/// `u_{m-1} - (1 - chi_m) u_0 - J^alpha[N_{m-1} + (1 - chi_m) g]`.
pub fn build_rm<T: Scalar>(
    p: &ProblemSpec<T>,
    cfg: &HatmConfig<T>,
    history: &[FracSeries<T>],
    m: usize,
) -> Result<FracSeries<T>> {
    build_rm_with_event(p, cfg, history, m).map(|(rm, _)| rm)
}

fn step<T: Scalar>(
    p: &ProblemSpec<T>,
    cfg: &HatmConfig<T>,
    history: &[FracSeries<T>],
    m: usize,
) -> Result<(FracSeries<T>, Option<TaylorEvent>)> {
    let (rm, event) = build_rm_with_event(p, cfg, history, m)?;
    let scaled = rm.scale(cfg.hbar);
    let um = if chi(m) == 1 { history[m - 1].add(&scaled) } else { scaled };
    Ok((um.collect_onto(&p.basis()), event))
}

/// `u_m = chi_m u_{m-1} + hbar R_m`.
pub fn deformation_step<T: Scalar>(
    p: &ProblemSpec<T>,
    cfg: &HatmConfig<T>,
    history: &[FracSeries<T>],
    m: usize,
) -> Result<FracSeries<T>> {
    step(p, cfg, history, m).map(|(u, _)| u)
}

pub fn run_report<T: Scalar>(p: &ProblemSpec<T>, cfg: &HatmConfig<T>) -> Result<HatmRun<T>> {
    cfg.validate()?;
    let mut iterates = Vec::with_capacity(cfg.order + 1);
    iterates.push(FracSeries::spatial(p.initial.clone()));
    let mut taylor_events = Vec::new();
    for m in 1..=cfg.order {
        let (um, event) = step(p, cfg, &iterates, m)?;
        taylor_events.extend(event);
        iterates.push(um);
    }
    Ok(HatmRun { iterates, taylor_events })
}

/// Iterates `[u_0, ..., u_order]`.
pub fn run<T: Scalar>(p: &ProblemSpec<T>, cfg: &HatmConfig<T>) -> Result<Vec<FracSeries<T>>> {
    run_report(p, cfg).map(|r| r.iterates)
}

/// `u_0 + ... + u_upto`.
pub fn partial_sum<T: Scalar>(iterates: &[FracSeries<T>], upto: usize) -> Result<FracSeries<T>> {
    if upto >= iterates.len() {
        return Err(HatmError::Index { index: upto, len: iterates.len() });
    }
    let refs: Vec<&FracSeries<T>> = iterates[..=upto].iter().collect();
    Ok(FracSeries::sum_of(&refs))
}

/// A space-time probe point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Probe<T> {
    pub point: Point<T>,
    pub t: T,
}

impl<T: Scalar> Probe<T> {
    pub fn new(x: T, y: T, t: T) -> Self {
        Self { point: Point::new(x, y), t }
    }
}

/// `|D^alpha s - N(s) - g|` at each probe, with the quadratic part of `N`
/// acting on `s` itself.
pub fn residual<T: Scalar>(
    p: &ProblemSpec<T>,
    s: &FracSeries<T>,
    cfg: &HatmConfig<T>,
    points: &[Probe<T>],
) -> Result<Vec<T>> {
    let lhs = s.caputo_derivative()?;
    let rhs = apply_operator_full(p, s).add(&p.source);
    let r = lhs.sub(&rhs).bind(cfg.alpha)?;
    points.par_iter().map(|pr| r.evaluate(pr.point, pr.t).map(|v| v.abs())).collect()
}

/// Value of the order-`cfg.order` partial sum at `probe` for each `hbar`.
pub fn h_curve<T: Scalar>(
    p: &ProblemSpec<T>,
    cfg_base: &HatmConfig<T>,
    probe: Probe<T>,
    h_values: &[T],
) -> Result<Vec<(T, T)>> {
    if h_values.is_empty() {
        return Err(HatmError::Config("h-curve needs at least one hbar value".into()));
    }
    h_values
        .par_iter()
        .map(|&h| {
            let cfg = cfg_base.with_hbar(h)?;
            let iterates = run(p, &cfg)?;
            let sum = partial_sum(&iterates, cfg.order)?;
            Ok((h, sum.evaluate(probe.point, probe.t, cfg.alpha)?))
        })
        .collect()
}
