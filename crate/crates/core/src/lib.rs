//! Singular moduli of class-number-one CM curves, the primes at which two
//! such curves become cyclically `m`-isogenous, and the Eisenstein, Green
//! function and Petersson-norm machinery that controls those primes.
//!
//! Modules, bottom-up:
//!
//! * [`numkernel`]: error-carrying big floats, Legendre functions, quadrature.
//! * [`quadfield`]: the real quadratic field `ℚ(√(D1·D2))`, its primes and `ρ_{K/F}`.
//! * [`eisenstein`]: exact Whittaker values and Fourier coefficients `c_k(m; p^{2r+1})`.
//! * [`modpoly`]: certified values `φ_m(j1, j2)`, the prime sets `π(m)` and the valuation ledger.
//! * [`green`]: higher Green functions `G_k^m` and the numeric GKZ identity.
//! * [`petersson`]: cusps of `Γ₀(N)`, volumes, truncated coefficient sums and the norm audit.
//! * [`ffisogeny`]: minimal isogeny degrees between supersingular reductions.

pub mod arith;
pub mod eisenstein;
pub mod error;
pub mod ffisogeny;
pub mod green;
pub mod modpoly;
pub mod numkernel;
pub mod petersson;
pub mod qseries;
pub mod quadfield;

pub use error::{Error, Result};
pub use quadfield::DiscriminantPair;
