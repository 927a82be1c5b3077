//! Error type shared by all modules.

use num_complex::Complex64;

/// Errors produced by curve construction, evaluation and the numerical
/// procedures built on top of them.
#[derive(Debug, Clone, thiserror::Error)]
pub enum BrodyError {
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("rational components share the common factor of degree {0}")]
    CommonFactor(usize),
    #[error("evaluation at pole: z = {0} is within {1:e} of a lattice point")]
    LatticePole(Complex64, f64),
    #[error("empty domain")]
    EmptyDomain,
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("no normalization: curve is constant")]
    ConstantCurve,
    #[error("window must be positive, got {0}")]
    InvalidWindow(f64),
    #[error("field is not defined on a torus")]
    NotTorus,
    #[error("grid too small: need at least 8x8, got {0}x{1}")]
    GridTooSmall(usize, usize),
    #[error("constraints infeasible at this K, R: {0} consecutive rejections")]
    SamplingInfeasible(usize),
    #[error("curve is not doubly periodic")]
    NotElliptic,
    #[error("blow-up precondition violated at z = {0}: d(f(z), q) = {1} > {2}")]
    BubblePrecondition(Complex64, f64, f64),
    #[error("feasibility condition {0} fails: worst margin {1} at z = {2}")]
    Infeasible(&'static str, f64, Complex64),
    #[error("blow-up failed at center index {index}: {source}")]
    ResolveStep {
        index: usize,
        source: Box<BrodyError>,
    },
    #[error("Ornstein-Weiss condition violated: {0}")]
    WindowFunctional(&'static str),
    #[error("need at least {0} scales, got {1}")]
    TooFewScales(usize, usize),
    #[error("scales span only a factor {0:.2}; a slope fit needs a decade")]
    ScaleSpanTooNarrow(f64),
    #[error("nondegeneracy precondition fails: worst center {0} has sup {1}")]
    NotNondegenerate(Complex64, f64),
    #[error("resolution-unstable maximum: re-evaluation delta {0} exceeds {1}")]
    ResolutionUnstable(f64, f64),
    #[error("rho estimate out of range: {0} not in [0, 1)")]
    RhoOutOfRange(f64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for BrodyError {
    fn from(e: std::io::Error) -> Self {
        BrodyError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, BrodyError>;
