//! Exact Fourier coefficients of the coherent and incoherent Eisenstein
//! series attached to a discriminant pair.
//!
//! Everything here is exact: local Whittaker values are 0/1, derivatives are
//! rational multiples of `log p`, and the assembled coefficients
//! `c_k(m; p^{2r+1})` are rationals because `P_{k−1}` is even for odd `k`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::primes_up_to;
use crate::numkernel::{legendre_p_even_at_square, rational_to_f64, ExactRational};
use crate::quadfield::{
    diff_set, enumerate_trace_m, factor_element, prime_profile, rho_kf, DiscriminantPair, FieldElement,
    IdealFactorization, PrimeOfF,
};
use crate::{Error, Result};

/// Weights for which the coefficient identities are exercised.
pub const WEIGHTS: [u32; 4] = [1, 3, 5, 7];

/// Input to the local Whittaker formulas at a prime of residue norm `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WhittakerQuery {
    /// `o(t√D)`; negative values are rejected.
    pub o: i32,
    /// 0 for the incoherent space, 1 for its coherent neighbour.
    pub delta: u8,
    pub r: u32,
    pub p: u64,
}

impl WhittakerQuery {
    fn check(&self) -> Result<()> {
        if self.o < 0 {
            return Err(Error::Domain(format!("Whittaker valuation o = {} is negative", self.o)));
        }
        if self.delta > 1 {
            return Err(Error::Domain(format!("δ = {} is not 0 or 1", self.delta)));
        }
        Ok(())
    }
}

/// Normalized local Whittaker value: 1 iff `o >= δ + 2r` and `o ≡ δ (mod 2)`.
pub fn whittaker_value(q: &WhittakerQuery) -> Result<u32> {
    q.check()?;
    let (o, d, r) = (q.o as i64, q.delta as i64, q.r as i64);
    Ok(u32::from(o >= d + 2 * r && (o - d) % 2 == 0))
}

/// Coefficient of `log p` in the derivative of the local Whittaker value:
/// `(o − δ + 1)/2 − r − p^{1−δ−2r}(1 − p^{δ+2r})/(p² − 1)` when
/// `o >= δ + 2r` and `o ≢ δ (mod 2)`, and 0 otherwise.
pub fn whittaker_deriv(q: &WhittakerQuery) -> Result<ExactRational> {
    q.check()?;
    let (o, d, r) = (q.o as i64, q.delta as i64, q.r as i64);
    if !(o >= d + 2 * r && (o - d) % 2 != 0) {
        return Ok(BigRational::zero());
    }
    let p = BigInt::from(q.p);
    let pow = |e: i64| -> BigRational {
        if e >= 0 {
            BigRational::from_integer(p.pow(e as u32))
        } else {
            BigRational::new(BigInt::from(1), p.pow((-e) as u32))
        }
    };
    let one = BigRational::from_integer(BigInt::from(1));
    let head = BigRational::new(BigInt::from(o - d + 1), BigInt::from(2)) - BigRational::from_integer(BigInt::from(r));
    let tail = pow(1 - d - 2 * r) * (one - pow(d + 2 * r)) / BigRational::from_integer(&p * &p - 1);
    Ok(head - tail)
}

/// Both sides of the local matching identity at valuation `o`:
/// `Σ_r W_{δ=1}(o, r)` and the derivative `W'_{δ=0}(o, 0)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EstIdentity {
    pub o: u32,
    pub coherent_sum: u64,
    pub incoherent_derivative: String,
    pub holds: bool,
}

pub fn est_identity(o: u32) -> EstIdentity {
    // any prime works: for r = 0, δ = 0 the p-dependent term vanishes
    let mut coherent = 0u64;
    for r in 0..=o / 2 {
        coherent += whittaker_value(&WhittakerQuery { o: o as i32, delta: 1, r, p: 2 }).unwrap() as u64;
    }
    let deriv = whittaker_deriv(&WhittakerQuery { o: o as i32, delta: 0, r: 0, p: 2 }).unwrap();
    let parity_side = if o % 2 == 1 { (o as u64 + 1) / 2 } else { 0 };
    let holds = BigRational::from_integer(BigInt::from(coherent)) == deriv && coherent == parity_side;
    EstIdentity { o, coherent_sum: coherent, incoherent_derivative: deriv.to_string(), holds }
}

/// True iff the local matching identity holds at valuation `o`.
pub fn est_identity_check(o: u32) -> bool {
    est_identity(o).holds
}

/// `ρ_{K/F}(t√D·𝔭^{−(2r+1)})`, or 0 when the quotient is not integral.
pub fn coherent_coeff(t_sqrt_d: &FieldElement, q: &PrimeOfF, r: u32, cfg: &DiscriminantPair) -> Result<u64> {
    let f = factor_element(t_sqrt_d, cfg)?;
    coherent_coeff_factored(&f, q, r, cfg)
}

fn coherent_coeff_factored(f: &IdealFactorization, q: &PrimeOfF, r: u32, cfg: &DiscriminantPair) -> Result<u64> {
    if !q.inert_in_k {
        return Err(Error::Domain(format!("{q} is not inert in K")));
    }
    match f.divide(q, 2 * r + 1) {
        Some(quot) => rho_kf(&quot, cfg),
        None => Ok(0),
    }
}

/// `2(1 + ord_𝔭(t√D))·ρ_{K/F}(t√D·𝔭^{−1})` when `Diff(t) = {𝔭}`, else 0.
pub fn incoherent_coeff(t_sqrt_d: &FieldElement, q: &PrimeOfF, cfg: &DiscriminantPair) -> Result<u64> {
    let diff = diff_set(t_sqrt_d, cfg)?;
    if diff.len() != 1 || diff[0] != *q {
        return Ok(0);
    }
    let f = factor_element(t_sqrt_d, cfg)?;
    let e = f.exponent(q);
    let quot = f.divide(q, 1).expect("q is in the support of Diff");
    Ok(2 * (1 + e as u64) * rho_kf(&quot, cfg)?)
}

/// Both sides of the ρ-level matching identity for `t` at an inert-in-K
/// prime `𝔭` of valuation `o`: `Σ_{r<=o/2} ρ(t√D/𝔭^{2r+1})` against
/// `[o odd]·(o+1)/2·ρ(t√D·𝔭^{−o})`.
pub fn matching_identity(t_sqrt_d: &FieldElement, q: &PrimeOfF, cfg: &DiscriminantPair) -> Result<(u64, u64)> {
    let f = factor_element(t_sqrt_d, cfg)?;
    let o = f.exponent(q);
    let mut lhs = 0;
    for r in 0..=o / 2 {
        lhs += coherent_coeff_factored(&f, q, r, cfg)?;
    }
    let rhs = if o % 2 == 1 { (o as u64 + 1) / 2 * rho_kf(&f.divide(q, o).unwrap(), cfg)? } else { 0 };
    Ok((lhs, rhs))
}

/// Largest `r` with `p^{2r+1} <= m²D/4`; `None` when even `p > m²D/4`.
pub fn r_max(m: u64, p: u64, cfg: &DiscriminantPair) -> Option<u32> {
    let bound = (m as u128) * (m as u128) * cfg.d as u128;
    let mut pk = p as u128;
    if 4 * pk > bound {
        return None;
    }
    let mut r = 0;
    loop {
        pk *= (p as u128) * (p as u128);
        if 4 * pk > bound {
            return Some(r);
        }
        r += 1;
    }
}

/// The trace-`m` elements with their factorizations, shared by every
/// coefficient at that `m`.
#[derive(Clone, Debug)]
pub struct TraceTable {
    pub m: u64,
    pub entries: Vec<(FieldElement, IdealFactorization)>,
}

impl TraceTable {
    pub fn new(m: u64, cfg: &DiscriminantPair) -> Result<Self> {
        let entries = enumerate_trace_m(m, cfg)
            .into_iter()
            .map(|t| factor_element(&t, cfg).map(|f| (t, f)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { m, entries })
    }
}

/// `P_{k−1}(a/(m√D))` computed exactly through `x² = a²/(m²D)`.
fn legendre_weight(a: i64, m: u64, k: u32, d: i64) -> ExactRational {
    let x2 = BigRational::new(BigInt::from(a) * BigInt::from(a), BigInt::from(m) * BigInt::from(m) * BigInt::from(d));
    legendre_p_even_at_square((k - 1) as usize, &x2)
}

fn check_weight(k: u32) -> Result<()> {
    if k % 2 == 1 && (1..=7).contains(&k) {
        Ok(())
    } else {
        Err(Error::Domain(format!("weight k = {k} is not one of 1, 3, 5, 7")))
    }
}

/// `c_k(m; p^{2r+1}) = m^{k−1} Σ_{𝔭|p inert in K} Σ_t P_{k−1}((t−t′)/m)·ρ(t√D/𝔭^{2r+1})`.
pub fn ck_coeff(m: u64, p: u64, r: u32, k: u32, cfg: &DiscriminantPair) -> Result<ExactRational> {
    check_weight(k)?;
    let table = TraceTable::new(m, cfg)?;
    ck_coeff_from(&table, p, r, k, cfg)
}

pub fn ck_coeff_from(table: &TraceTable, p: u64, r: u32, k: u32, cfg: &DiscriminantPair) -> Result<ExactRational> {
    check_weight(k)?;
    let mut total = BigRational::zero();
    for q in prime_profile(p, cfg).into_iter().filter(|q| q.inert_in_k) {
        for (t, f) in &table.entries {
            let c = coherent_coeff_factored(f, &q, r, cfg)?;
            if c != 0 {
                total += legendre_weight(t.a, table.m, k, cfg.d) * BigRational::from_integer(BigInt::from(c));
            }
        }
    }
    Ok(total * BigRational::from_integer(BigInt::from(table.m).pow(k - 1)))
}

/// Every nonzero `c_k(m; p^{2r+1})` in one pass, keyed by `(p, r)`.
///
/// Only primes dividing some `Nm(t√D)` can contribute, so this avoids
/// scanning all `p <= m²D/4`.
pub fn ck_support(table: &TraceTable, k: u32, cfg: &DiscriminantPair) -> Result<BTreeMap<(u64, u32), ExactRational>> {
    check_weight(k)?;
    let mut out: BTreeMap<(u64, u32), ExactRational> = BTreeMap::new();
    let scale = BigRational::from_integer(BigInt::from(table.m).pow(k - 1));
    for (t, f) in &table.entries {
        let weight = legendre_weight(t.a, table.m, k, cfg.d);
        for (q, &e) in f.factors.iter().filter(|(q, _)| q.inert_in_k) {
            for r in 0..=(e.saturating_sub(1)) / 2 {
                let c = coherent_coeff_factored(f, q, r, cfg)?;
                if c != 0 {
                    *out.entry((q.p, r)).or_insert_with(BigRational::zero) +=
                        &weight * BigRational::from_integer(BigInt::from(c)) * &scale;
                }
            }
        }
    }
    out.retain(|_, v| !v.is_zero());
    Ok(out)
}

/// One exact coefficient, as exported by the CLI.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientRecord {
    pub m: u64,
    pub p: u64,
    pub r: u32,
    pub k: u32,
    pub numerator: String,
    pub denominator: String,
}

impl CoefficientRecord {
    pub fn new(m: u64, p: u64, r: u32, k: u32, value: &ExactRational) -> Self {
        Self { m, p, r, k, numerator: value.numer().to_string(), denominator: value.denom().to_string() }
    }
}

/// Diagnostic ratio `|c_k|·p^{2r+1}·√D / (m^k·log(m+1))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundAudit {
    pub m: u64,
    pub p: u64,
    pub r: u32,
    pub k: u32,
    pub coefficient: String,
    pub ratio: f64,
}

pub fn bound_audit(m: u64, p: u64, r: u32, k: u32, cfg: &DiscriminantPair) -> Result<BoundAudit> {
    let c = ck_coeff(m, p, r, k, cfg)?;
    let ratio = if c.is_zero() {
        0.0
    } else {
        let pk = (p as f64).powi(2 * r as i32 + 1);
        rational_to_f64(&c.abs()) * pk * (cfg.d as f64).sqrt() / ((m as f64).powi(k as i32) * ((m + 1) as f64).ln())
    };
    Ok(BoundAudit { m, p, r, k, coefficient: c.to_string(), ratio })
}

/// `Σ_{p, r} log p · c_k(m; p^{2r+1})` in double precision, with the list of
/// contributing primes.
pub fn weighted_log_sum(m: u64, k: u32, cfg: &DiscriminantPair) -> Result<(f64, Vec<u64>)> {
    let table = TraceTable::new(m, cfg)?;
    let support = ck_support(&table, k, cfg)?;
    let mut primes: Vec<u64> = support.keys().map(|&(p, _)| p).collect();
    primes.dedup();
    let total = crate::numkernel::quadrature::compensated_sum(
        support.iter().map(|(&(p, _), c)| (p as f64).ln() * rational_to_f64(c)),
    );
    Ok((total, primes))
}

/// All primes `p <= m²D/4` (the range in which coefficients can live).
pub fn coefficient_prime_range(m: u64, cfg: &DiscriminantPair) -> Vec<u64> {
    let bound = (m as u128 * m as u128 * cfg.d as u128 / 4).to_u64().unwrap_or(u64::MAX);
    primes_up_to(bound)
}
