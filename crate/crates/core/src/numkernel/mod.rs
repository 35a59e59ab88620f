//! Arbitrary-precision substrate and the special functions used elsewhere.
//!
//! Real numbers are carried as [`BigFloatWithError`] balls (a big-float
//! midpoint plus an upper bound on the absolute error). Exact rationals use
//! `num_rational::BigRational`, which is always stored in lowest terms with a
//! positive denominator.

pub mod bigfloat;
pub mod elementary;
pub mod mag;
pub mod quadrature;
pub mod special;

pub use bigfloat::{BigFloat, BigFloatWithError, ComplexWithError};
pub use mag::Mag;
pub use special::{
    kronecker, legendre_p, legendre_p_all, legendre_p_even_at_square, legendre_q, legendre_q_f64, rational_to_f64,
    tail_integral, tail_integral_f64, LegendreScalar,
};

/// Exact rational numbers (lowest terms, positive denominator).
pub type ExactRational = num_rational::BigRational;
