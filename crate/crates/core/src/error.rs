use thiserror::Error;

/// Failures reported by the numerical kernels and the function/spectrum layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),
    #[error("non-integrable singularity: endpoint exponent {0} must be < 1")]
    NonIntegrableSingularity(f64),
    #[error("bracket failure: target {target} outside [{low}, {high}]")]
    BracketFailure { target: f64, low: f64, high: f64 },
    #[error("domain: {0}")]
    Domain(String),
    #[error("divergent: {0}")]
    Divergent(String),
    #[error("near-divergent modulus: K_pq({k}) exceeds {limit:e}")]
    NearDivergentModulus { k: f64, limit: f64 },
    #[error("no flat cores below p=2 (flat-core solutions require p > 2, got p = {0})")]
    NoFlatCores(f64),
    #[error("no interior minimum: Phi has an interior minimizer only when p < q (p = {p}, q = {q})")]
    NoInteriorMinimum { p: f64, q: f64 },
    #[error("near-singular sample point t = {0}")]
    NearSingularSample(f64),
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
