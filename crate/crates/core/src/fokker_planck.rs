//! Forward and backward Kolmogorov operators expanded into monomial lists,
//! the five reference problems, and the problem-definition file format.

use serde::{Deserialize, Serialize};

use crate::engine::{LinearMonomial, MultiIndex, ProblemSpec, QuadraticMonomial};
use crate::error::{HatmError, Result};
use crate::scalar::Scalar;
use crate::series::{Coefficient, FracSeries, FracTerm, TimeFactor};
use crate::spatial::{Point, SpatialExpr, Var};
use crate::special::{gamma, mittag_leffler, MLParams};

/// One addend `spatial * e^(exp_rate t) * u^u_degree` of a drift or diffusion
/// coefficient.
#[derive(Debug, Clone)]
pub struct CoefficientSpec<T> {
    pub spatial: SpatialExpr<T>,
    pub exp_rate: i64,
    pub u_degree: u8,
}

impl<T: Scalar> CoefficientSpec<T> {
    pub fn new(spatial: SpatialExpr<T>) -> Self {
        Self { spatial, exp_rate: 0, u_degree: 0 }
    }

    pub fn with_rate(mut self, c: i64) -> Self {
        self.exp_rate = c;
        self
    }

    pub fn with_u(mut self) -> Self {
        self.u_degree = 1;
        self
    }
}

/// A coefficient is a sum of [`CoefficientSpec`] addends.
pub type Coef<T> = Vec<CoefficientSpec<T>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    Forward,
    Backward,
}

fn unit(dim: u8, i: usize) -> MultiIndex {
    match (dim, i) {
        (_, 0) => MultiIndex::X,
        _ => MultiIndex::Y,
    }
}

fn var(i: usize) -> Var {
    if i == 0 {
        Var::X
    } else {
        Var::Y
    }
}

fn check_shapes<T>(dim: u8, a: &[Coef<T>], b: &[Vec<Coef<T>>]) -> Result<()> {
    if !(1..=2).contains(&dim) {
        return Err(HatmError::Problem(format!("dimension {dim} not supported")));
    }
    let n = dim as usize;
    if a.len() != n || b.len() != n || b.iter().any(|row| row.len() != n) {
        return Err(HatmError::Problem(format!("drift needs {n} entries and diffusion {n}x{n}")));
    }
    Ok(())
}

/// Accumulates monomials, merging those with equal derivatives and rate.
#[derive(Default)]
struct Expansion<T> {
    linear: Vec<LinearMonomial<T>>,
    quadratic: Vec<QuadraticMonomial<T>>,
}

impl<T: Scalar> Expansion<T> {
    fn linear(&mut self, coef: SpatialExpr<T>, exp_rate: i64, deriv: MultiIndex) {
        if coef.is_zero() {
            return;
        }
        match self.linear.iter_mut().find(|m| m.deriv == deriv && m.exp_rate == exp_rate) {
            Some(m) => m.coef = m.coef.clone() + coef,
            None => self.linear.push(LinearMonomial { coef, exp_rate, deriv }),
        }
    }

    fn quadratic(&mut self, coef: SpatialExpr<T>, exp_rate: i64, a: MultiIndex, b: MultiIndex) {
        if coef.is_zero() {
            return;
        }
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        match self.quadratic.iter_mut().find(|m| m.deriv_a == a && m.deriv_b == b && m.exp_rate == exp_rate) {
            Some(m) => m.coef = m.coef.clone() + coef,
            None => self.quadratic.push(QuadraticMonomial { coef, exp_rate, deriv_a: a, deriv_b: b }),
        }
    }

    /// Adds `k * D^outer (P u^(deg+1))` expanded by the product rule, where
    /// `outer` is one or two first-order derivatives.
    fn product_rule(&mut self, k: T, part: &CoefficientSpec<T>, outer: &[(MultiIndex, Var)]) -> Result<()> {
        let p = part.spatial.scale(k);
        let c = part.exp_rate;
        match (part.u_degree, outer) {
            (0, [(di, vi)]) => {
                self.linear(p.differentiate(*vi), c, MultiIndex::NONE);
                self.linear(p, c, *di);
            }
            (0, [(di, vi), (dj, vj)]) => {
                self.linear(p.differentiate(*vi).differentiate(*vj), c, MultiIndex::NONE);
                self.linear(p.differentiate(*vi), c, *dj);
                self.linear(p.differentiate(*vj), c, *di);
                self.linear(p, c, di.plus(*dj));
            }
            // D(P u^2) = P' u^2 + 2 P u u'
            (1, [(di, vi)]) => {
                self.quadratic(p.differentiate(*vi), c, MultiIndex::NONE, MultiIndex::NONE);
                self.quadratic(p.scale(T::lit(2.0)), c, MultiIndex::NONE, *di);
            }
            (1, [(di, vi), (dj, vj)]) => {
                let two = T::lit(2.0);
                self.quadratic(p.differentiate(*vi).differentiate(*vj), c, MultiIndex::NONE, MultiIndex::NONE);
                self.quadratic(p.differentiate(*vi).scale(two), c, MultiIndex::NONE, *dj);
                self.quadratic(p.differentiate(*vj).scale(two), c, MultiIndex::NONE, *di);
                self.quadratic(p.scale(two), c, *di, *dj);
                self.quadratic(p.scale(two), c, MultiIndex::NONE, di.plus(*dj));
            }
            (d, _) => {
                return Err(HatmError::Problem(format!(
                    "coefficient of degree {d} in u makes the operator exceed quadratic"
                )))
            }
        }
        Ok(())
    }

    fn finish(self, dim: u8, f: SpatialExpr<T>) -> Result<ProblemSpec<T>> {
        let linear = self.linear.into_iter().filter(|m| !is_identically_zero(&m.coef)).collect();
        let quadratic = self.quadratic.into_iter().filter(|m| !is_identically_zero(&m.coef)).collect();
        ProblemSpec::new(dim, linear, quadratic, f, FracSeries::zero())
    }
}

fn is_identically_zero<T: Scalar>(e: &SpatialExpr<T>) -> bool {
    e.is_zero() || e.is_numerically_equal(&SpatialExpr::zero())
}

/// `D^alpha u = -sum_i d_i (A_i u) + sum_ij d_i d_j (B_ij u)`, expanded by the
/// product rule. Addends with `u_degree = 1` produce quadratic monomials.
pub fn build_forward<T: Scalar>(
    dim: u8,
    a: &[Coef<T>],
    b: &[Vec<Coef<T>>],
    f: SpatialExpr<T>,
) -> Result<ProblemSpec<T>> {
    check_shapes(dim, a, b)?;
    let mut ex = Expansion::default();
    for (i, ai) in a.iter().enumerate() {
        for part in ai {
            ex.product_rule(-T::one(), part, &[(unit(dim, i), var(i))])?;
        }
    }
    for (i, row) in b.iter().enumerate() {
        for (j, bij) in row.iter().enumerate() {
            for part in bij {
                ex.product_rule(T::one(), part, &[(unit(dim, i), var(i)), (unit(dim, j), var(j))])?;
            }
        }
    }
    ex.finish(dim, f)
}

/// `D^alpha u = -sum_i A_i d_i u + sum_ij B_ij d_i d_j u`; coefficients stay
/// outside the derivatives and may not depend on `u`.
pub fn build_backward<T: Scalar>(
    dim: u8,
    a: &[Coef<T>],
    b: &[Vec<Coef<T>>],
    f: SpatialExpr<T>,
) -> Result<ProblemSpec<T>> {
    check_shapes(dim, a, b)?;
    let mut ex = Expansion::default();
    let reject_u = |part: &CoefficientSpec<T>| {
        if part.u_degree != 0 {
            Err(HatmError::Problem("backward form takes coefficients independent of u".into()))
        } else {
            Ok(())
        }
    };
    for (i, ai) in a.iter().enumerate() {
        for part in ai {
            reject_u(part)?;
            ex.linear(-part.spatial.clone(), part.exp_rate, unit(dim, i));
        }
    }
    for (i, row) in b.iter().enumerate() {
        for (j, bij) in row.iter().enumerate() {
            for part in bij {
                reject_u(part)?;
                ex.linear(part.spatial.clone(), part.exp_rate, unit(dim, i).plus(unit(dim, j)));
            }
        }
    }
    ex.finish(dim, f)
}

/// Identifiers of the reference problems.
pub const PRESETS: [&str; 5] = ["4.1", "4.2", "4.3", "4.4", "4.5"];

fn c<T: Scalar>(e: SpatialExpr<T>) -> CoefficientSpec<T> {
    CoefficientSpec::new(e)
}

fn k<T: Scalar>(v: f64) -> SpatialExpr<T> {
    SpatialExpr::constant(T::lit(v))
}

pub fn preset<T: Scalar>(id: &str) -> Result<ProblemSpec<T>> {
    type E<T> = SpatialExpr<T>;
    let x = E::<T>::x;
    let y = E::<T>::y;
    match id {
        // A = -1, B = 1, f = x
        "4.1" => build_forward(1, &[vec![c(k(-1.0))]], &[vec![vec![c(k(1.0))]]], x()),
        // A = e^t (coth x cosh x + sinh x) - coth x, B = e^t cosh x, f = sinh x
        "4.2" => build_forward(
            1,
            &[vec![c(E::coth(x()) * E::cosh(x()) + E::sinh(x())).with_rate(1), c(-E::coth(x()))]],
            &[vec![vec![c(E::cosh(x())).with_rate(1)]]],
            E::sinh(x()),
        ),
        // backward: A = -(x + 1), B = e^t x^2, f = x + 1
        "4.3" => {
            build_backward(1, &[vec![c(-(x() + k(1.0)))]], &[vec![vec![c(E::powi(x(), 2)).with_rate(1)]]], x() + k(1.0))
        }
        // A = (x, 5y), B = [[x^2, 1], [1, y^2]], f = x
        "4.4" => build_forward(
            2,
            &[vec![c(x())], vec![c(y().scale(T::lit(5.0)))]],
            &[vec![vec![c(E::powi(x(), 2))], vec![c(k(1.0))]], vec![vec![c(k(1.0))], vec![c(E::powi(y(), 2))]]],
            x(),
        ),
        // A = 4u/x - x/3, B = u, f = x^2
        "4.5" => build_forward(
            1,
            &[vec![c(E::recip(x()).scale(T::lit(4.0))).with_u(), c(x().scale(-T::one() / T::lit(3.0)))]],
            &[vec![vec![c(k(1.0)).with_u()]]],
            E::powi(x(), 2),
        ),
        other => Err(HatmError::UnknownPreset(other.to_string())),
    }
}

/// Closed-form reference solutions of the reference problems.
///
/// At `alpha = 1` these are the exact solutions. For `alpha < 1`, preset 4.1
/// uses `x + t^alpha / Gamma(alpha + 1)` and the others `f(x) E_alpha(t^alpha)`,
/// the sum of the `hbar = -1` iterates.
pub fn oracle<T: Scalar>(id: &str, point: Point<T>, t: T, alpha: T) -> Result<T> {
    let (x, y) = (point.x, point.y);
    let _ = y;
    let one = T::one();
    let f = match id {
        "4.1" => {
            return Ok(if alpha == one { x + t } else { x + t.powf(alpha) / gamma(alpha + one)? });
        }
        "4.2" => x.sinh(),
        "4.3" => x + one,
        "4.4" => x,
        "4.5" => x * x,
        other => return Err(HatmError::NoOracle(other.to_string())),
    };
    if alpha == one {
        return Ok(f * t.exp());
    }
    Ok(f * mittag_leffler(MLParams::classic(alpha)?, t.powf(alpha))?)
}

/// One coefficient addend in a problem file: either a bare prefix expression
/// or an object with optional `exp_rate` and `u_degree`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoefFileEntry {
    Expr(String),
    Full {
        expr: String,
        #[serde(default)]
        exp_rate: i64,
        #[serde(default)]
        u_degree: u8,
    },
}

/// A coefficient in a problem file: one addend or a list of addends.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoefFile {
    One(CoefFileEntry),
    Sum(Vec<CoefFileEntry>),
}

/// A source term `coef * spatial * t^(p + q alpha) * e^(ct)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SourceTermFile {
    #[serde(default = "default_one")]
    pub coef: f64,
    pub spatial: String,
    #[serde(default = "default_p")]
    pub p: String,
    #[serde(default)]
    pub q: i64,
    #[serde(default)]
    pub c: i64,
}

fn default_one() -> f64 {
    1.0
}

fn default_p() -> String {
    "0".into()
}

/// Problem definition file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemFile {
    pub form: Form,
    pub dim: u8,
    #[serde(rename = "A")]
    pub a: Vec<CoefFile>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<CoefFile>>,
    pub f: String,
    #[serde(default)]
    pub g: Vec<SourceTermFile>,
}

fn entry_to_spec<T: Scalar>(e: &CoefFileEntry) -> Result<CoefficientSpec<T>> {
    Ok(match e {
        CoefFileEntry::Expr(s) => CoefficientSpec::new(s.parse()?),
        CoefFileEntry::Full { expr, exp_rate, u_degree } => {
            CoefficientSpec { spatial: expr.parse()?, exp_rate: *exp_rate, u_degree: *u_degree }
        }
    })
}

fn coef_to_spec<T: Scalar>(c: &CoefFile) -> Result<Coef<T>> {
    match c {
        CoefFile::One(e) => Ok(vec![entry_to_spec(e)?]),
        CoefFile::Sum(es) => es.iter().map(entry_to_spec).collect(),
    }
}

impl ProblemFile {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| HatmError::Problem(e.to_string()))
    }

    pub fn to_problem<T: Scalar>(&self) -> Result<ProblemSpec<T>> {
        let a: Vec<Coef<T>> = self.a.iter().map(coef_to_spec).collect::<Result<_>>()?;
        let b: Vec<Vec<Coef<T>>> =
            self.b.iter().map(|row| row.iter().map(coef_to_spec).collect::<Result<_>>()).collect::<Result<_>>()?;
        let f: SpatialExpr<T> = self.f.parse()?;
        let problem = match self.form {
            Form::Forward => build_forward(self.dim, &a, &b, f)?,
            Form::Backward => build_backward(self.dim, &a, &b, f)?,
        };
        let mut source = Vec::with_capacity(self.g.len());
        for g in &self.g {
            let p = g.p.parse().map_err(|_| HatmError::Problem(format!("bad time power '{}'", g.p)))?;
            source.push(FracTerm::new(
                Coefficient::constant(T::lit(g.coef)),
                g.spatial.parse()?,
                TimeFactor::new(p, g.q, g.c)?,
            ));
        }
        Ok(problem.with_source(FracSeries::from_terms(source)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::apply_operator;

    type E = SpatialExpr<f64>;

    fn apply_to(p: &ProblemSpec<f64>, u: E) -> FracSeries<f64> {
        apply_operator(p, &[FracSeries::spatial(u)], 1).unwrap()
    }

    #[test]
    fn preset_41_monomials() {
        let p = preset::<f64>("4.1").unwrap();
        assert_eq!(p.linear().len(), 2);
        for m in p.linear() {
            assert!(m.coef.is_one());
            assert!(m.deriv == MultiIndex::X || m.deriv == MultiIndex::XX);
        }
        assert_eq!(apply_to(&p, E::x()), FracSeries::one());
    }

    #[test]
    fn presets_reproduce_initial_eigenfunction() {
        for (id, f) in [("4.2", E::sinh(E::x())), ("4.4", E::x()), ("4.5", E::powi(E::x(), 2))] {
            let p = preset::<f64>(id).unwrap();
            let out = apply_to(&p, f.clone());
            assert_eq!(out.len(), 1, "{id}");
            assert!(!out.has_exponential(), "{id}");
            assert!(out.terms()[0].spatial.is_numerically_equal(&f), "{id}");
            assert!((out.terms()[0].coef.evaluate(0.5).unwrap() - 1.0).abs() < 1e-12, "{id}");
        }
    }

    #[test]
    fn backward_preset_43_monomials() {
        let p = preset::<f64>("4.3").unwrap();
        assert_eq!(p.linear().len(), 2);
        let dx = p.linear().iter().find(|m| m.deriv == MultiIndex::X).unwrap();
        assert!(dx.coef.is_numerically_equal(&(E::one() + E::x())));
        assert_eq!(dx.exp_rate, 0);
        let dxx = p.linear().iter().find(|m| m.deriv == MultiIndex::XX).unwrap();
        assert!(dxx.coef.is_numerically_equal(&E::powi(E::x(), 2)));
        assert_eq!(dxx.exp_rate, 1);
    }

    #[test]
    fn backward_rejects_u_dependence() {
        let r = build_backward(1, &[vec![c(E::x()).with_u()]], &[vec![vec![]]], E::x());
        assert!(r.is_err());
    }

    #[test]
    fn degree_overflow() {
        let mut part = c(E::x());
        part.u_degree = 2;
        assert!(build_forward(1, &[vec![part]], &[vec![vec![]]], E::x()).is_err());
    }

    #[test]
    fn empty_operator() {
        let p = build_forward(1, &[vec![]], &[vec![vec![]]], E::cosh(E::x())).unwrap();
        assert!(p.linear().is_empty() && p.quadratic().is_empty());
    }

    #[test]
    fn forward_and_backward_agree_for_constant_coefficients() {
        let a = [vec![c(E::constant(-2.0))], vec![c(E::constant(0.5))]];
        let b = [
            vec![vec![c(E::constant(1.5))], vec![c(E::constant(0.25))]],
            vec![vec![c(E::constant(0.25))], vec![c(E::constant(3.0))]],
        ];
        let fw = build_forward(2, &a, &b, E::x()).unwrap();
        let bw = build_backward(2, &a, &b, E::x()).unwrap();
        assert_eq!(fw.linear().len(), bw.linear().len());
        for m in fw.linear() {
            let other = bw.linear().iter().find(|o| o.deriv == m.deriv).unwrap();
            assert!(m.coef.is_numerically_equal(&other.coef));
        }
    }

    #[test]
    fn mixed_derivatives_are_merged() {
        let p = preset::<f64>("4.4").unwrap();
        let xy: Vec<_> = p.linear().iter().filter(|m| m.deriv == MultiIndex::XY).collect();
        assert_eq!(xy.len(), 1);
        assert!(xy[0].coef.is_numerically_equal(&E::constant(2.0)));
    }

    #[test]
    fn unknown_preset() {
        assert!(matches!(preset::<f64>("4.9"), Err(HatmError::UnknownPreset(_))));
        assert!(matches!(oracle("x", Point::x(1.0), 0.1, 1.0), Err(HatmError::NoOracle(_))));
    }

    #[test]
    fn problem_file_parses() {
        let text = r#"{
            "form": "forward", "dim": 1,
            "A": [[{"expr": "(mul (coth x) (cosh x))", "exp_rate": 1}, {"expr": "sinh x", "exp_rate": 1}, "(neg (coth x))"]],
            "B": [[{"expr": "(cosh x)", "exp_rate": 1}]],
            "f": "(sinh x)"
        }"#;
        let file = ProblemFile::from_json(text);
        // "sinh x" is not a valid prefix expression
        assert!(file.unwrap().to_problem::<f64>().is_err());
        let text = text.replace("\"sinh x\"", "\"(sinh x)\"");
        let p = ProblemFile::from_json(&text).unwrap().to_problem::<f64>().unwrap();
        let out = apply_to(&p, E::sinh(E::x()));
        assert_eq!(out.len(), 1);
        assert!(out.terms()[0].spatial.is_numerically_equal(&E::sinh(E::x())));
    }

    #[test]
    fn problem_file_with_source() {
        let text = r#"{"form": "backward", "dim": 1, "A": ["0"], "B": [["0"]], "f": "0",
                       "g": [{"spatial": "1"}]}"#;
        let p = ProblemFile::from_json(text).unwrap().to_problem::<f64>().unwrap();
        assert_eq!(p.source(), &FracSeries::one());
    }

    #[test]
    fn oracles_at_alpha_one() {
        let pt = Point::x(1.2);
        assert!((oracle::<f64>("4.1", pt, 0.3, 1.0).unwrap() - 1.5).abs() < 1e-15);
        assert!((oracle::<f64>("4.5", pt, 0.5, 1.0).unwrap() - 1.44 * 0.5_f64.exp()).abs() < 1e-14);
        let frac = oracle("4.3", Point::x(1.0), 0.5, 0.5).unwrap();
        let ml = mittag_leffler(MLParams::classic(0.5).unwrap(), 0.5_f64.sqrt()).unwrap();
        assert!((frac - 2.0 * ml).abs() < 1e-14);
    }
}
