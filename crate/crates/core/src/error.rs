use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("singular input: {0}")]
    Singular(String),
    #[error("zero element has no valuation")]
    ZeroElement,
    #[error("prime {0} is ramified in K/F; the discriminant pair violates the coprime hypothesis")]
    RamifiedInKF(u64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("precision insufficient: {0}")]
    PrecisionInsufficient(String),
    #[error("precision escalation limit reached at {bits} bits (residual {residual})")]
    PrecisionEscalation { bits: u32, residual: f64 },
    #[error("orbit collision: a degree-{m} matrix maps z2 onto z1")]
    OrbitCollision { m: u64 },
    #[error("non-integral predicted valuation {0}")]
    NonIntegral(String),
    #[error("need coefficients up to n = {needed}, only {available} available")]
    InsufficientCoefficients { needed: usize, available: usize },
    #[error("quadrature did not converge: {0}")]
    QuadratureNonConvergence(String),
    #[error("bad prime {0}: divides 6·D1·D2")]
    BadPrime(u64),
    #[error("no isogeny degree found up to the bound {bound} for p = {p}")]
    NotFound { p: u64, bound: u64 },
    #[error("mismatch: {0}")]
    Mismatch(String),
    #[error("cache corruption: {0}")]
    CacheCorruption(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
