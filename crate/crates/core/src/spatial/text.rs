//! Prefix notation, e.g. `(mul (sinh x) (pow x 2))`.
//!
//! Besides the printed forms the parser accepts `neg`, `sub`, `div` and the
//! alias `cosech`, for hand-written problem files.

use std::fmt;

use num_rational::Rational64;

use super::{Func, Node, SpatialExpr, Var};
use crate::error::{HatmError, Result};
use crate::scalar::Scalar;

pub(super) fn write_prefix<T: Scalar>(e: &SpatialExpr<T>, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e.node() {
        Node::Const(c) => write!(f, "{c}"),
        Node::Var(v) => f.write_str(v.name()),
        Node::Add(terms) => write_list(f, "add", terms),
        Node::Mul(factors) => write_list(f, "mul", factors),
        Node::Pow(base, r) => {
            write!(f, "(pow ")?;
            write_prefix(base, f)?;
            write!(f, " {r})")
        }
        Node::Apply(func, arg) => {
            write!(f, "({} ", func.name())?;
            write_prefix(arg, f)?;
            f.write_str(")")
        }
        Node::Recip(arg) => {
            f.write_str("(recip ")?;
            write_prefix(arg, f)?;
            f.write_str(")")
        }
    }
}

fn write_list<T: Scalar>(f: &mut fmt::Formatter<'_>, op: &str, items: &[SpatialExpr<T>]) -> fmt::Result {
    write!(f, "({op}")?;
    for item in items {
        f.write_str(" ")?;
        write_prefix(item, f)?;
    }
    f.write_str(")")
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Open,
    Close,
    Atom(String),
}

fn tokenize(s: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut atom = String::new();
    let flush = |atom: &mut String, tokens: &mut Vec<Token>| {
        if !atom.is_empty() {
            tokens.push(Token::Atom(std::mem::take(atom)));
        }
    };
    for ch in s.chars() {
        match ch {
            '(' => {
                flush(&mut atom, &mut tokens);
                tokens.push(Token::Open);
            }
            ')' => {
                flush(&mut atom, &mut tokens);
                tokens.push(Token::Close);
            }
            c if c.is_whitespace() => flush(&mut atom, &mut tokens),
            c => atom.push(c),
        }
    }
    flush(&mut atom, &mut tokens);
    tokens
}

pub(super) fn parse_prefix<T: Scalar>(s: &str) -> Result<SpatialExpr<T>> {
    let tokens = tokenize(s);
    let mut pos = 0;
    let e = parse_expr(&tokens, &mut pos)?;
    if pos != tokens.len() {
        return Err(HatmError::Parse(format!("trailing input in '{s}'")));
    }
    Ok(e)
}

fn parse_rational(s: &str) -> Result<Rational64> {
    let bad = || HatmError::Parse(format!("bad exponent '{s}'"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.parse().map_err(|_| bad())?;
            let d: i64 = d.parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Rational64::new(n, d))
        }
        None => s.parse::<i64>().map(Rational64::from_integer).map_err(|_| bad()),
    }
}

fn parse_expr<T: Scalar>(tokens: &[Token], pos: &mut usize) -> Result<SpatialExpr<T>> {
    let tok = tokens.get(*pos).ok_or_else(|| HatmError::Parse("unexpected end of input".into()))?;
    *pos += 1;
    match tok {
        Token::Close => Err(HatmError::Parse("unexpected ')'".into())),
        Token::Atom(a) => parse_atom(a),
        Token::Open => {
            let op = match tokens.get(*pos) {
                Some(Token::Atom(op)) => op.clone(),
                _ => return Err(HatmError::Parse("expected operator after '('".into())),
            };
            *pos += 1;
            let e = if op == "pow" {
                let base = parse_expr(tokens, pos)?;
                let exp = match tokens.get(*pos) {
                    Some(Token::Atom(r)) => parse_rational(r)?,
                    _ => return Err(HatmError::Parse("pow needs a rational exponent".into())),
                };
                *pos += 1;
                SpatialExpr::pow(base, exp)
            } else {
                let mut args = Vec::new();
                while let Some(t) = tokens.get(*pos) {
                    if *t == Token::Close {
                        break;
                    }
                    args.push(parse_expr(tokens, pos)?);
                }
                build(&op, args)?
            };
            match tokens.get(*pos) {
                Some(Token::Close) => {
                    *pos += 1;
                    Ok(e)
                }
                _ => Err(HatmError::Parse(format!("missing ')' after '{op}'"))),
            }
        }
    }
}

fn parse_atom<T: Scalar>(a: &str) -> Result<SpatialExpr<T>> {
    match a {
        "x" => Ok(SpatialExpr::var(Var::X)),
        "y" => Ok(SpatialExpr::var(Var::Y)),
        _ => a
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .map(|v| SpatialExpr::constant(T::lit(v)))
            .ok_or_else(|| HatmError::Parse(format!("unknown atom '{a}'"))),
    }
}

fn build<T: Scalar>(op: &str, mut args: Vec<SpatialExpr<T>>) -> Result<SpatialExpr<T>> {
    let arity = |n: usize, args: &Vec<SpatialExpr<T>>| {
        if args.len() == n {
            Ok(())
        } else {
            Err(HatmError::Parse(format!("'{op}' takes {n} argument(s), got {}", args.len())))
        }
    };
    if let Some(func) = Func::from_name(op) {
        arity(1, &args)?;
        return Ok(SpatialExpr::apply(func, args.pop().unwrap()));
    }
    match op {
        "add" => Ok(SpatialExpr::add(args)),
        "mul" => Ok(SpatialExpr::mul(args)),
        "recip" => {
            arity(1, &args)?;
            Ok(SpatialExpr::recip(args.pop().unwrap()))
        }
        "neg" => {
            arity(1, &args)?;
            Ok(-args.pop().unwrap())
        }
        "sub" => {
            arity(2, &args)?;
            let b = args.pop().unwrap();
            let a = args.pop().unwrap();
            Ok(a - b)
        }
        "div" => {
            arity(2, &args)?;
            let b = args.pop().unwrap();
            let a = args.pop().unwrap();
            Ok(a * SpatialExpr::recip(b))
        }
        _ => Err(HatmError::Parse(format!("unknown operator '{op}'"))),
    }
}
