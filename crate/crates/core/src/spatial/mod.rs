//! Immutable expression trees over the spatial variables `x` and `y`.
//!
//! Trees carry the drift and diffusion coefficients and the spatial parts of
//! every series term. Construction only folds constants and absorbs zeros and
//! ones; equality of two trees as functions is decided by comparing their
//! values on a fixed set of sample points (see [`Fingerprint`]).

mod fingerprint;
mod text;

use std::cmp::Ordering;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_rational::Rational64;
use num_traits::{One, Zero};

use crate::error::{HatmError, Result};
use crate::scalar::Scalar;

pub use fingerprint::{Fingerprint, SAMPLE_POINTS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    X,
    Y,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::Y => "y",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Func {
    Sinh,
    Cosh,
    Tanh,
    Coth,
    Csch,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Coth => "coth",
            Func::Csch => "csch",
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "tanh" => Func::Tanh,
            "coth" => Func::Coth,
            "csch" | "cosech" => Func::Csch,
            _ => return None,
        })
    }
}

/// A point in the (at most two dimensional) spatial domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn x(x: T) -> Self {
        Self { x, y: T::zero() }
    }

    fn get(&self, v: Var) -> T {
        match v {
            Var::X => self.x,
            Var::Y => self.y,
        }
    }
}

#[derive(Debug)]
pub enum Node<T> {
    Const(T),
    Var(Var),
    Add(Vec<SpatialExpr<T>>),
    Mul(Vec<SpatialExpr<T>>),
    Pow(SpatialExpr<T>, Rational64),
    Apply(Func, SpatialExpr<T>),
    Recip(SpatialExpr<T>),
}

#[derive(Debug)]
struct Inner<T> {
    node: Node<T>,
    size: usize,
    fingerprint: OnceLock<Fingerprint<T>>,
}

#[derive(Debug)]
pub struct SpatialExpr<T>(Arc<Inner<T>>);

impl<T> Clone for SpatialExpr<T> {
    fn clone(&self) -> Self {
        SpatialExpr(Arc::clone(&self.0))
    }
}

impl<T: Scalar> SpatialExpr<T> {
    fn from_node(node: Node<T>) -> Self {
        let size = 1 + match &node {
            Node::Const(_) | Node::Var(_) => 0,
            Node::Add(c) | Node::Mul(c) => c.iter().map(|e| e.size()).sum(),
            Node::Pow(b, _) | Node::Apply(_, b) | Node::Recip(b) => b.size(),
        };
        SpatialExpr(Arc::new(Inner { node, size, fingerprint: OnceLock::new() }))
    }

    pub fn node(&self) -> &Node<T> {
        &self.0.node
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        self.0.size
    }

    pub fn constant(v: T) -> Self {
        Self::from_node(Node::Const(v))
    }

    pub fn zero() -> Self {
        Self::constant(T::zero())
    }

    pub fn one() -> Self {
        Self::constant(T::one())
    }

    pub fn var(v: Var) -> Self {
        Self::from_node(Node::Var(v))
    }

    pub fn x() -> Self {
        Self::var(Var::X)
    }

    pub fn y() -> Self {
        Self::var(Var::Y)
    }

    pub fn as_constant(&self) -> Option<T> {
        match self.node() {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_constant() == Some(T::zero())
    }

    pub fn is_one(&self) -> bool {
        self.as_constant() == Some(T::one())
    }

    pub fn add(terms: Vec<Self>) -> Self {
        let mut constant = T::zero();
        let mut rest = Vec::with_capacity(terms.len());
        for t in terms {
            match t.node() {
                Node::Const(c) => constant = constant + *c,
                Node::Add(children) => {
                    for c in children {
                        match c.node() {
                            Node::Const(v) => constant = constant + *v,
                            _ => rest.push(c.clone()),
                        }
                    }
                }
                _ => rest.push(t),
            }
        }
        if constant != T::zero() {
            rest.push(Self::constant(constant));
        }
        match rest.len() {
            0 => Self::zero(),
            1 => rest.pop().unwrap(),
            _ => Self::from_node(Node::Add(rest)),
        }
    }

    pub fn mul(factors: Vec<Self>) -> Self {
        let mut constant = T::one();
        let mut rest = Vec::with_capacity(factors.len());
        for f in factors {
            match f.node() {
                Node::Const(c) => constant = constant * *c,
                Node::Mul(children) => {
                    for c in children {
                        match c.node() {
                            Node::Const(v) => constant = constant * *v,
                            _ => rest.push(c.clone()),
                        }
                    }
                }
                _ => rest.push(f),
            }
        }
        if constant == T::zero() {
            return Self::zero();
        }
        if rest.is_empty() {
            return Self::constant(constant);
        }
        if constant != T::one() {
            rest.insert(0, Self::constant(constant));
        }
        if rest.len() == 1 {
            rest.pop().unwrap()
        } else {
            Self::from_node(Node::Mul(rest))
        }
    }

    pub fn pow(base: Self, exponent: Rational64) -> Self {
        if exponent.is_zero() {
            return Self::one();
        }
        if exponent.is_one() {
            return base;
        }
        if let Some(c) = base.as_constant() {
            if exponent.is_integer() {
                let n = exponent.to_integer();
                if c != T::zero() || n > 0 {
                    return Self::constant(c.powi(n as i32));
                }
            } else if c > T::zero() {
                return Self::constant(c.powf(T::from_ratio(exponent)));
            }
        }
        Self::from_node(Node::Pow(base, exponent))
    }

    pub fn powi(base: Self, n: i64) -> Self {
        Self::pow(base, Rational64::from_integer(n))
    }

    pub fn apply(func: Func, arg: Self) -> Self {
        if let Some(c) = arg.as_constant() {
            if let Ok(v) = eval_func(func, c) {
                return Self::constant(v);
            }
        }
        Self::from_node(Node::Apply(func, arg))
    }

    pub fn sinh(arg: Self) -> Self {
        Self::apply(Func::Sinh, arg)
    }

    pub fn cosh(arg: Self) -> Self {
        Self::apply(Func::Cosh, arg)
    }

    pub fn tanh(arg: Self) -> Self {
        Self::apply(Func::Tanh, arg)
    }

    pub fn coth(arg: Self) -> Self {
        Self::apply(Func::Coth, arg)
    }

    pub fn csch(arg: Self) -> Self {
        Self::apply(Func::Csch, arg)
    }

    pub fn recip(arg: Self) -> Self {
        if let Some(c) = arg.as_constant() {
            if c.abs() >= T::division_floor() {
                return Self::constant(T::one() / c);
            }
        }
        Self::from_node(Node::Recip(arg))
    }

    pub fn scale(&self, k: T) -> Self {
        Self::mul(vec![Self::constant(k), self.clone()])
    }

    /// Exact symbolic partial derivative with respect to `v`.
    pub fn differentiate(&self, v: Var) -> Self {
        match self.node() {
            Node::Const(_) => Self::zero(),
            Node::Var(w) => {
                if *w == v {
                    Self::one()
                } else {
                    Self::zero()
                }
            }
            Node::Add(terms) => Self::add(terms.iter().map(|t| t.differentiate(v)).collect()),
            Node::Mul(factors) => {
                let mut sum = Vec::new();
                for (i, f) in factors.iter().enumerate() {
                    let df = f.differentiate(v);
                    if df.is_zero() {
                        continue;
                    }
                    let mut prod: Vec<Self> = factors.clone();
                    prod[i] = df;
                    sum.push(Self::mul(prod));
                }
                Self::add(sum)
            }
            Node::Pow(base, r) => {
                let db = base.differentiate(v);
                if db.is_zero() {
                    return Self::zero();
                }
                Self::mul(vec![Self::constant(T::from_ratio(*r)), Self::pow(base.clone(), *r - Rational64::one()), db])
            }
            Node::Apply(func, arg) => {
                let da = arg.differentiate(v);
                if da.is_zero() {
                    return Self::zero();
                }
                let outer = match func {
                    Func::Sinh => Self::cosh(arg.clone()),
                    Func::Cosh => Self::sinh(arg.clone()),
                    Func::Tanh => Self::powi(Self::cosh(arg.clone()), -2),
                    Func::Coth => Self::mul(vec![Self::constant(-T::one()), Self::powi(Self::csch(arg.clone()), 2)]),
                    Func::Csch => {
                        Self::mul(vec![Self::constant(-T::one()), Self::csch(arg.clone()), Self::coth(arg.clone())])
                    }
                };
                Self::mul(vec![outer, da])
            }
            Node::Recip(arg) => {
                let da = arg.differentiate(v);
                if da.is_zero() {
                    return Self::zero();
                }
                Self::mul(vec![Self::constant(-T::one()), Self::powi(arg.clone(), -2), da])
            }
        }
    }

    /// Applies `d^n/dx^n d^m/dy^m`.
    pub fn differentiate_multi(&self, dx: u8, dy: u8) -> Self {
        let mut e = self.clone();
        for _ in 0..dx {
            e = e.differentiate(Var::X);
        }
        for _ in 0..dy {
            e = e.differentiate(Var::Y);
        }
        e
    }

    pub fn evaluate(&self, point: Point<T>) -> Result<T> {
        let v = self.eval_inner(point)?;
        if !v.is_finite() {
            return Err(HatmError::NonFinite(point.x.as_f64(), point.y.as_f64()));
        }
        Ok(v)
    }

    fn eval_inner(&self, point: Point<T>) -> Result<T> {
        let singular = |what| HatmError::Singularity(what, point.x.as_f64(), point.y.as_f64());
        Ok(match self.node() {
            Node::Const(c) => *c,
            Node::Var(v) => point.get(*v),
            Node::Add(terms) => {
                let mut acc = T::zero();
                for t in terms {
                    acc = acc + t.eval_inner(point)?;
                }
                acc
            }
            Node::Mul(factors) => {
                let mut acc = T::one();
                for f in factors {
                    acc = acc * f.eval_inner(point)?;
                }
                acc
            }
            Node::Pow(base, r) => {
                let b = base.eval_inner(point)?;
                if *r < Rational64::zero() && b.abs() < T::division_floor() {
                    return Err(singular("pow"));
                }
                if r.is_integer() {
                    b.powi(r.to_integer() as i32)
                } else if b < T::zero() {
                    return Err(HatmError::Domain { function: "pow", value: b.as_f64() });
                } else {
                    b.powf(T::from_ratio(*r))
                }
            }
            Node::Apply(func, arg) => {
                let a = arg.eval_inner(point)?;
                eval_func(*func, a).map_err(|_| singular(func.name()))?
            }
            Node::Recip(arg) => {
                let a = arg.eval_inner(point)?;
                if a.abs() < T::division_floor() {
                    return Err(singular("recip"));
                }
                T::one() / a
            }
        })
    }

    /// Values at the fixed sample points; cached on the tree.
    pub fn fingerprint(&self) -> &Fingerprint<T> {
        self.0.fingerprint.get_or_init(|| Fingerprint::of(self))
    }

    pub fn is_numerically_equal(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.fingerprint().approx_eq(other.fingerprint())
    }

    /// Every distinct subtree (by identity), the root included.
    pub fn subexpressions(&self) -> Vec<Self> {
        let mut out: Vec<Self> = Vec::new();
        let mut stack = vec![self.clone()];
        while let Some(e) = stack.pop() {
            if out.iter().any(|o| Arc::ptr_eq(&o.0, &e.0)) {
                continue;
            }
            match e.node() {
                Node::Const(_) | Node::Var(_) => {}
                Node::Add(c) | Node::Mul(c) => stack.extend(c.iter().cloned()),
                Node::Pow(b, _) | Node::Apply(_, b) | Node::Recip(b) => stack.push(b.clone()),
            }
            out.push(e);
        }
        out
    }

    pub fn uses_var(&self, v: Var) -> bool {
        match self.node() {
            Node::Const(_) => false,
            Node::Var(w) => *w == v,
            Node::Add(c) | Node::Mul(c) => c.iter().any(|e| e.uses_var(v)),
            Node::Pow(b, _) | Node::Apply(_, b) | Node::Recip(b) => b.uses_var(v),
        }
    }

    /// Total order used to make series ordering deterministic.
    pub fn fingerprint_cmp(&self, other: &Self) -> Ordering {
        self.fingerprint().lexicographic_cmp(other.fingerprint())
    }
}

fn eval_func<T: Scalar>(func: Func, a: T) -> std::result::Result<T, ()> {
    let floor = T::division_floor();
    match func {
        Func::Sinh => Ok(a.sinh()),
        Func::Cosh => Ok(a.cosh()),
        Func::Tanh => Ok(a.tanh()),
        Func::Coth => {
            let s = a.sinh();
            if s.abs() < floor {
                Err(())
            } else {
                Ok(a.cosh() / s)
            }
        }
        Func::Csch => {
            let s = a.sinh();
            if s.abs() < floor {
                Err(())
            } else {
                Ok(T::one() / s)
            }
        }
    }
}

impl<T: Scalar> PartialEq for SpatialExpr<T> {
    /// Structural equality.
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        match (self.node(), other.node()) {
            (Node::Const(a), Node::Const(b)) => a == b,
            (Node::Var(a), Node::Var(b)) => a == b,
            (Node::Add(a), Node::Add(b)) | (Node::Mul(a), Node::Mul(b)) => a == b,
            (Node::Pow(a, r), Node::Pow(b, s)) => r == s && a == b,
            (Node::Apply(f, a), Node::Apply(g, b)) => f == g && a == b,
            (Node::Recip(a), Node::Recip(b)) => a == b,
            _ => false,
        }
    }
}

impl<T: Scalar> std::ops::Add for SpatialExpr<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        SpatialExpr::add(vec![self, rhs])
    }
}

impl<T: Scalar> std::ops::Sub for SpatialExpr<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        SpatialExpr::add(vec![self, -rhs])
    }
}

impl<T: Scalar> std::ops::Mul for SpatialExpr<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        SpatialExpr::mul(vec![self, rhs])
    }
}

impl<T: Scalar> std::ops::Neg for SpatialExpr<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-T::one())
    }
}

impl<T: Scalar> fmt::Display for SpatialExpr<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        text::write_prefix(self, f)
    }
}

impl<T: Scalar> std::str::FromStr for SpatialExpr<T> {
    type Err = HatmError;
    fn from_str(s: &str) -> Result<Self> {
        text::parse_prefix(s)
    }
}
