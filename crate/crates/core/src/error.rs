use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ambient dimension n = {0} is not supported (need n >= 3)")]
    InvalidDimension(usize),

    #[error("operation requires n = {expected}, got n = {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("point is not on the unit sphere (| |x| - 1 | = {0:e})")]
    NotOnSphere(f64),

    #[error("matrix is not in SO0(1,n): {0}")]
    NotInGroup(String),

    #[error("matrix is not a rotation: {0}")]
    NotOrthogonal(String),

    #[error("projective normalisation degenerated ((g.(1,x))_0 = {0:e})")]
    DegenerateAction(f64),

    #[error("grid request too large: {nodes} nodes exceeds the budget of {budget}")]
    GridTooLarge { nodes: usize, budget: usize },

    #[error("invalid truncation degree: {0}")]
    InvalidDegree(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("s = {s} lies within {distance:e} of the pole {pole}")]
    NearPole {
        s: Complex64,
        pole: f64,
        distance: f64,
    },

    #[error(
        "continuation step at s = {s} hits a zero of s(s+n-3); \
         perturb alpha off the real axis (e.g. add 1e-3 i) and retry"
    )]
    DescentDenominator { s: Complex64 },

    #[error("parameters outside the convergent region: {0}")]
    OutsideConvergence(String),

    #[error("parameters outside the direct-evaluation regime: {0}")]
    OutsideDirectRegime(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed data: {0}")]
    Parse(String),
}
