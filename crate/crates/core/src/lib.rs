//! Semi-analytic solver for time-fractional Fokker–Planck equations based on
//! the homotopy analysis transform method.
//!
//! Series are kept symbolic in the fractional order `alpha`; every numeric
//! type is generic over [`Scalar`] (`f32` or `f64`). The aliases at the bottom
//! fix the scalar to `f64`.

pub mod engine;
pub mod error;
pub mod fokker_planck;
pub mod scalar;
pub mod series;
pub mod spatial;
pub mod special;

pub use engine::{
    apply_operator, h_curve, partial_sum, residual, run, run_report, AuxFunction, HatmConfig, HatmRun, LinearMonomial,
    MultiIndex, Probe, ProblemSpec, QuadraticMonomial, TaylorEvent,
};
pub use error::{HatmError, Result};
pub use fokker_planck::{build_backward, build_forward, oracle, preset, CoefficientSpec, Form, ProblemFile, PRESETS};
pub use scalar::Scalar;
pub use series::{Coefficient, FracSeries, FracTerm, GammaArg, GammaMonomial, TimeFactor};
pub use spatial::{Fingerprint, Func, Point, SpatialExpr, Var};
pub use special::{gamma, log_gamma, mittag_leffler, MLParams};

pub type Expr = SpatialExpr<f64>;
pub type Series = FracSeries<f64>;
pub type Term = FracTerm<f64>;
pub type Problem = ProblemSpec<f64>;
pub type Config = HatmConfig<f64>;
pub type Run = HatmRun<f64>;
