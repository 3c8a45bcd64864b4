//! JSON form of a series: a list of
//! `{coef_tokens, spatial, p, q, c}` objects, where `coef_tokens` lists the
//! weighted Gamma monomials and `spatial` is prefix notation.

use num_rational::Rational64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Coefficient, FracSeries, FracTerm, GammaArg, GammaMonomial, TimeFactor};
use crate::error::{HatmError, Result};
use crate::scalar::Scalar;
use crate::spatial::SpatialExpr;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaTokenJson {
    /// Gamma argument `a + b*alpha`, `a` as an exact rational string.
    pub a: String,
    pub b: i64,
    pub power: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenJson {
    pub weight: f64,
    #[serde(default)]
    pub gamma: Vec<GammaTokenJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub coef_tokens: Vec<TokenJson>,
    pub spatial: String,
    pub p: String,
    pub q: i64,
    pub c: i64,
}

pub type SeriesJson = Vec<TermJson>;

fn parse_ratio(s: &str) -> Result<Rational64> {
    s.trim().parse::<Rational64>().map_err(|_| HatmError::Serde(format!("bad rational '{s}'")))
}

impl<T: Scalar> FracSeries<T> {
    pub fn to_json_terms(&self) -> SeriesJson {
        self.terms
            .iter()
            .map(|t| TermJson {
                coef_tokens: t
                    .coef
                    .parts()
                    .iter()
                    .map(|(m, w)| TokenJson {
                        weight: w.as_f64(),
                        gamma: m
                            .factors()
                            .map(|(arg, power)| GammaTokenJson { a: arg.a.to_string(), b: arg.b, power: *power })
                            .collect(),
                    })
                    .collect(),
                spatial: t.spatial.to_string(),
                p: t.time.p().to_string(),
                q: t.time.q(),
                c: t.time.c(),
            })
            .collect()
    }

    pub fn from_json_terms(terms: &[TermJson]) -> Result<Self> {
        let mut out = Vec::with_capacity(terms.len());
        for t in terms {
            let mut parts = Vec::with_capacity(t.coef_tokens.len());
            for token in &t.coef_tokens {
                let mut m = GammaMonomial::one();
                let mut w = T::lit(token.weight);
                for g in &token.gamma {
                    let arg = GammaArg::new(parse_ratio(&g.a)?, g.b);
                    w = w * m.times::<T>(arg, g.power);
                }
                parts.push((m, w));
            }
            let spatial: SpatialExpr<T> = t.spatial.parse()?;
            let time = TimeFactor::new(parse_ratio(&t.p)?, t.q, t.c)?;
            out.push(FracTerm::new(Coefficient::from_parts(parts), spatial, time));
        }
        Ok(Self::from_terms(out))
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json_terms()).expect("series JSON is always serializable")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let terms: SeriesJson = serde_json::from_str(s).map_err(|e| HatmError::Serde(e.to_string()))?;
        Self::from_json_terms(&terms)
    }
}

impl<T: Scalar> Serialize for FracSeries<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json_terms().serialize(serializer)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for FracSeries<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let terms = SeriesJson::deserialize(deserializer)?;
        Self::from_json_terms(&terms).map_err(serde::de::Error::custom)
    }
}
