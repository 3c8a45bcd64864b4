use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HatmError {
    #[error("gamma function pole at {0}")]
    GammaPole(f64),
    #[error("argument {value} outside the domain of {function}")]
    Domain { function: &'static str, value: f64 },
    #[error("{function} overflowed at {value}")]
    Overflow { function: &'static str, value: f64 },
    #[error("Mittag-Leffler series did not converge within {terms} terms (z = {z})")]
    NonConvergence { terms: usize, z: f64 },

    #[error("singularity in {0} at x = {1}, y = {2}")]
    Singularity(&'static str, f64, f64),
    #[error("expression evaluated to a non-finite value at x = {0}, y = {1}")]
    NonFinite(f64, f64),
    #[error("cannot parse expression: {0}")]
    Parse(String),

    #[error("term with exponential rate {0} must be Taylor-expanded first")]
    ExponentialTerm(i64),
    #[error("time exponent {0} would be negative")]
    NegativeExponent(String),
    #[error("derivative order {0} not supported (1 or 2)")]
    DerivativeOrder(u8),
    #[error("taylor expansion needs at least one term")]
    TaylorTerms,

    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid problem: {0}")]
    Problem(String),
    #[error("index {index} out of range for {len} iterates")]
    Index { index: usize, len: usize },
    #[error("unknown preset '{0}'")]
    UnknownPreset(String),
    #[error("no oracle registered for {0}")]
    NoOracle(String),
    #[error("serialization: {0}")]
    Serde(String),
}

pub type Result<T, E = HatmError> = std::result::Result<T, E>;
