//! Exact values `φ_m(j1, j2)` of the classical modular polynomial at pairs
//! of singular moduli, the prime sets `π(m)`, and the valuation ledger that
//! predicts `ord_p φ_m(j1, j2)` from incoherent Eisenstein coefficients.
//!
//! `φ_m(j1, j2) = ∏ (j1 − j((a·z2 + b)/d))` over the cyclic cosets `(a, b, d)`
//! of degree `m`. Each factor is evaluated as a ball at a CM point given by an
//! exact quadratic form, and the product is rounded to the unique integer in
//! the final ball. Precision doubles until the rounding is certified.

pub mod cache;
pub mod jfunc;

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{dedekind_psi, divisors, is_prime, moebius, primes_up_to, val_big};
use crate::eisenstein::incoherent_coeff;
use crate::numkernel::{kronecker, ComplexWithError};
use crate::quadfield::{enumerate_trace_m, prime_profile, DiscriminantPair};
use crate::{Error, Result};
use jfunc::{eval_j, round_certified, QuadForm};

pub use cache::{Cache, CacheRecord};
pub use jfunc::{eval_j_f64, j_series, QExpansion};

/// Highest working precision tried before giving up.
pub const MAX_PRECISION_BITS: u32 = 1 << 17;

/// A certified evaluation of `φ_m(j1, j2)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalCertificate {
    pub m: u64,
    #[serde(with = "decimal")]
    pub value: BigInt,
    /// Distance of the computed midpoint to `value`.
    pub residual: f64,
    pub precision_bits: u32,
    pub coset_count: u64,
}

pub(crate) mod decimal {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// All `(a, b, d)` with `a·d = m`, `0 <= b < d`, `gcd(a, b, d) = 1`.
pub fn cyclic_cosets(m: u64) -> Vec<(u64, u64, u64)> {
    let mut out = Vec::new();
    for a in divisors(m) {
        let d = m / a;
        for b in 0..d {
            if a.gcd(&b).gcd(&d) == 1 {
                out.push((a, b, d));
            }
        }
    }
    out
}

/// The reduced quadratic form whose root is `(a·z + b)/d` for the principal
/// CM point `z` of discriminant `disc`.
pub fn coset_form(a: u64, b: u64, d: u64, disc: i64) -> QuadForm {
    let z = QuadForm::principal(disc);
    let (a, b, d) = (a as i64, b as i64, d as i64);
    // τ = (−(a·B − 2b) + a√disc) / (2d); scale numerator and denominator by d
    let big_a = d * d;
    let big_b = d * (a * z.b - 2 * b);
    let big_c = b * b - a * z.b * b + a * a * z.c;
    QuadForm { a: big_a, b: big_b, c: big_c }.primitive().reduce()
}

/// Rough `log2 |j(τ)|` for precision planning.
fn log2_j_estimate(f: &QuadForm) -> f64 {
    let (_, y) = f.root_f64();
    (2.0 * std::f64::consts::PI * y / std::f64::consts::LN_2).max(0.0) + 11.0
}

/// Distinct reduced forms among the cosets, with the coset-to-form map.
fn coset_forms(m: u64, cfg: &DiscriminantPair) -> (Vec<QuadForm>, Vec<usize>) {
    let mut index: BTreeMap<QuadForm, usize> = BTreeMap::new();
    let mut forms = Vec::new();
    let mut map = Vec::new();
    for (a, b, d) in cyclic_cosets(m) {
        let f = coset_form(a, b, d, cfg.d2);
        let i = *index.entry(f).or_insert_with(|| {
            forms.push(f);
            forms.len() - 1
        });
        map.push(i);
    }
    (forms, map)
}

fn eval_forms(forms: &[QuadForm], prec: u32) -> Result<Vec<ComplexWithError>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        forms.par_iter().map(|f| eval_j(f, prec)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        forms.iter().map(|f| eval_j(f, prec)).collect()
    }
}

/// The starting precision: enough bits for the size of the product plus a
/// margin, which the rounding certificate then confirms or rejects.
pub fn initial_precision(m: u64, cfg: &DiscriminantPair) -> u32 {
    let (forms, map) = coset_forms(m, cfg);
    let j1_bits = cfg.j1.bits() as f64 + 1.0;
    let size: f64 = map.iter().map(|&i| j1_bits.max(log2_j_estimate(&forms[i])) + 1.0).sum();
    (size.ceil() as u32 + 64).next_multiple_of(32)
}

/// `φ_m(j1, j2)` at a fixed working precision; `None` when the rounding
/// cannot be certified at that precision.
pub fn phi_value_at(m: u64, cfg: &DiscriminantPair, prec: u32) -> Result<Option<EvalCertificate>> {
    let (forms, map) = coset_forms(m, cfg);
    let values = eval_forms(&forms, prec)?;
    let j1 = ComplexWithError::from_bigint(&cfg.j1, prec);
    let mut product = ComplexWithError::one(prec);
    for &i in &map {
        product = product.mul(&j1.sub(&values[i]));
    }
    Ok(round_certified(&product).map(|(value, residual)| EvalCertificate {
        m,
        value,
        residual,
        precision_bits: prec,
        coset_count: map.len() as u64,
    }))
}

/// The exact integer `φ_m(j1, j2)`, certified by rounding.
pub fn phi_value(m: u64, cfg: &DiscriminantPair) -> Result<EvalCertificate> {
    if m == 0 {
        return Err(Error::Domain("m must be positive".into()));
    }
    let mut prec = initial_precision(m, cfg);
    loop {
        if let Some(cert) = phi_value_at(m, cfg, prec)? {
            return Ok(cert);
        }
        if prec >= MAX_PRECISION_BITS {
            return Err(Error::PrecisionEscalation { bits: prec, residual: f64::NAN });
        }
        prec *= 2;
    }
}

/// Recompute at `extra` more bits and demand the identical integer.
pub fn reverify(cert: &EvalCertificate, cfg: &DiscriminantPair, extra: u32) -> Result<bool> {
    let mut prec = cert.precision_bits + extra;
    loop {
        if let Some(c) = phi_value_at(cert.m, cfg, prec)? {
            return Ok(c.value == cert.value && c.coset_count == cert.coset_count);
        }
        if prec >= MAX_PRECISION_BITS {
            return Err(Error::PrecisionEscalation { bits: prec, residual: f64::NAN });
        }
        prec *= 2;
    }
}

/// `D·m²/4`, the bound on primes in `π(m)`.
pub fn prime_bound(m: u64, cfg: &DiscriminantPair) -> u64 {
    (m as u128 * m as u128 * cfg.d as u128 / 4) as u64
}

/// Whether `p` can divide `φ_m(j1, j2)` at all: it must be non-split in both
/// imaginary quadratic fields.
pub fn non_split_in_both(p: u64, cfg: &DiscriminantPair) -> bool {
    kronecker(cfg.d1, p as i64) != 1 && kronecker(cfg.d2, p as i64) != 1
}

/// `π(m)` from an already computed value.
pub fn pi_set_from(m: u64, value: &BigInt, cfg: &DiscriminantPair) -> Vec<u64> {
    primes_up_to(prime_bound(m, cfg))
        .into_iter()
        .filter(|&p| m % p != 0 && non_split_in_both(p, cfg))
        .filter(|&p| (value % BigInt::from(p)).is_zero())
        .collect()
}

/// The primes `p <= Dm²/4`, `p ∤ m`, dividing `φ_m(j1, j2)`.
pub fn pi_set(m: u64, cfg: &DiscriminantPair) -> Result<Vec<u64>> {
    let cert = phi_value(m, cfg)?;
    Ok(pi_set_from(m, &cert.value, cfg))
}

/// `(w1·w2/8)·Σ_{𝔭|p} Σ_{tr t = m} c^{(𝔭)}(t)`: the valuation at `p` of the
/// Hecke-translated norm `∏_{d²|m} φ_{m/d²}(j1, j2)`.
pub fn hecke_valuation(m: u64, p: u64, cfg: &DiscriminantPair) -> Result<u64> {
    let mut total = 0u64;
    let primes = prime_profile(p, cfg);
    for t in enumerate_trace_m(m, cfg) {
        for q in &primes {
            total += incoherent_coeff(&t, q, cfg)?;
        }
    }
    let scaled = total * cfg.w1 * cfg.w2;
    if scaled % 8 != 0 {
        return Err(Error::NonIntegral(format!("(w1w2/8)·{total} at m = {m}, p = {p}, cfg {cfg}")));
    }
    Ok(scaled / 8)
}

/// Predicted `ord_p φ_m(j1, j2)` for `p ∤ m`, by Möbius inversion of
/// [`hecke_valuation`] over the square divisors of `m`.
pub fn predicted_valuation(m: u64, p: u64, cfg: &DiscriminantPair) -> Result<u64> {
    if m % p == 0 {
        return Err(Error::Domain(format!("predicted_valuation needs p ∤ m (p = {p}, m = {m})")));
    }
    let mut total: i64 = 0;
    for d in divisors(m) {
        if m % (d * d) != 0 {
            continue;
        }
        let mu = moebius(d);
        if mu != 0 {
            total += mu * hecke_valuation(m / (d * d), p, cfg)? as i64;
        }
    }
    u64::try_from(total).map_err(|_| Error::NonIntegral(format!("negative valuation {total} at m = {m}, p = {p}")))
}

/// One line of the exact valuation ledger.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub m: u64,
    pub p: u64,
    pub predicted: u64,
    pub observed: u64,
}

/// Compare predicted and observed valuations for every prime `p ∤ m` that
/// could matter: all `p <= Dm²/4` and every prime factor of the value.
pub fn valuation_ledger(m: u64, cfg: &DiscriminantPair, value: &BigInt) -> Result<Vec<LedgerEntry>> {
    let mut primes: BTreeSet<u64> = primes_up_to(prime_bound(m, cfg)).into_iter().collect();
    // primes above the bound must not divide the value; include small ones regardless
    primes.extend(primes_up_to(64));
    let mut out = Vec::new();
    for p in primes {
        if m % p == 0 {
            continue;
        }
        let observed = val_big(value, p) as u64;
        let predicted = predicted_valuation(m, p, cfg)?;
        out.push(LedgerEntry { m, p, predicted, observed });
    }
    Ok(out)
}

/// True iff `|φ_m(j1, j2)|` is not an `S`-unit.
pub fn s_unit_check(m: u64, s: &[u64], cfg: &DiscriminantPair) -> Result<bool> {
    let cert = phi_value(m, cfg)?;
    Ok(!is_s_unit(&cert.value, s))
}

pub fn is_s_unit(value: &BigInt, s: &[u64]) -> bool {
    if value.is_zero() {
        return false;
    }
    let mut rest = value.abs();
    for &p in s {
        let p = BigInt::from(p);
        while (&rest % &p).is_zero() {
            rest /= &p;
        }
    }
    rest.is_one()
}

/// `(p¹² − 1)² mod m`.
fn torsion_residue(p: u64, m: u64) -> u64 {
    let m128 = m as u128;
    let mut x = 1u128 % m128;
    for _ in 0..12 {
        x = x * (p as u128 % m128) % m128;
    }
    let y = (x + m128 - 1 % m128) % m128;
    (y * y % m128) as u64
}

/// Lower bounds on members of `π(m)` implied by `m | (p¹² − 1)²`.
pub fn prime_floor_ok(p: u64, m: u64) -> bool {
    let pf = p as f64;
    let mf = m as f64;
    let squarefree = crate::arith::factor(m).iter().all(|&(_, e)| e == 1);
    let mut ok = pf >= mf.powf(1.0 / 24.0);
    if squarefree {
        ok &= pf >= mf.powf(1.0 / 12.0);
    }
    if is_prime(m) {
        ok &= pf >= (mf - 1.0).powf(1.0 / 6.0);
    }
    ok
}

/// Outcome of the torsion divisibility check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionReport {
    pub m: u64,
    pub ok: bool,
    pub offending: Vec<u64>,
}

pub fn torsion_divisibility_from(m: u64, pi: &[u64]) -> TorsionReport {
    let offending: Vec<u64> = pi.iter().copied().filter(|&p| p > 3 && torsion_residue(p, m) != 0).collect();
    TorsionReport { m, ok: offending.is_empty(), offending }
}

/// Every `p ∈ π(m)` with `p > 3` satisfies `m | (p¹² − 1)²`.
pub fn torsion_divisibility_check(m: u64, cfg: &DiscriminantPair) -> Result<TorsionReport> {
    Ok(torsion_divisibility_from(m, &pi_set(m, cfg)?))
}

/// Number of cyclic cosets of degree `m`.
pub fn coset_count(m: u64) -> u64 {
    dedekind_psi(m)
}

/// `|value|` reduced mod `p`.
pub fn value_mod(value: &BigInt, p: u64) -> u64 {
    value.mod_floor(&BigInt::from(p)).to_u64().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(a: i64, b: i64) -> DiscriminantPair {
        DiscriminantPair::new(a, b).unwrap()
    }

    /// The classical modular polynomial of level 2, expanded exactly.
    fn classical_phi2(x: &BigInt, y: &BigInt) -> BigInt {
        let c = |n: i64| BigInt::from(n);
        x.pow(3) + y.pow(3) - x * x * y * y + c(1488) * (x * x * y + x * y * y) - c(162000) * (x * x + y * y)
            + c(40773375) * x * y
            + c(8748000000) * (x + y)
            - c(157464000000000)
    }

    #[test]
    fn cosets() {
        assert_eq!(cyclic_cosets(1), vec![(1, 0, 1)]);
        let mut c2 = cyclic_cosets(2);
        c2.sort();
        assert_eq!(c2, vec![(1, 0, 2), (1, 1, 2), (2, 0, 1)]);
        for m in 1..=40 {
            assert_eq!(cyclic_cosets(m).len() as u64, dedekind_psi(m));
        }
        assert_eq!(cyclic_cosets(4).len(), 6);
    }

    #[test]
    fn small_values() {
        assert_eq!(phi_value(1, &cfg(-3, -4)).unwrap().value, BigInt::from(-1728));
        assert_eq!(phi_value(1, &cfg(-3, -8)).unwrap().value, BigInt::from(-8000));
        let c = cfg(-3, -4);
        let v = phi_value(2, &c).unwrap();
        assert_eq!(v.value, "-142826025627648".parse::<BigInt>().unwrap());
        assert_eq!(v.value, classical_phi2(&c.j1, &c.j2));
        assert_eq!(v.coset_count, 3);
        assert!(v.residual < 2f64.powi(-10));
        for (a, b) in [(-4, -7), (-7, -8), (-3, -11), (-8, -163)] {
            let c = cfg(a, b);
            assert_eq!(phi_value(2, &c).unwrap().value, classical_phi2(&c.j1, &c.j2), "{c}");
        }
    }

    #[test]
    fn pi_sets() {
        let c = cfg(-3, -4);
        assert_eq!(pi_set(1, &c).unwrap(), vec![2, 3]);
        let p2 = pi_set(2, &c).unwrap();
        assert!(p2.contains(&11) && !p2.contains(&2));
    }

    #[test]
    fn predicted_valuations() {
        let c = cfg(-3, -4);
        assert_eq!(predicted_valuation(1, 2, &c).unwrap(), 6);
        assert_eq!(predicted_valuation(1, 3, &c).unwrap(), 3);
        assert_eq!(predicted_valuation(1, 5, &c).unwrap(), 0);
        assert!(predicted_valuation(2, 2, &c).is_err());
    }

    #[test]
    fn s_units() {
        let c = cfg(-3, -4);
        assert!(!s_unit_check(1, &[2, 3], &c).unwrap());
        assert!(s_unit_check(1, &[], &c).unwrap());
        assert!(s_unit_check(2, &[2, 3], &c).unwrap());
    }

    #[test]
    fn torsion() {
        let c = cfg(-3, -4);
        assert!(torsion_divisibility_check(1, &c).unwrap().ok);
        assert!(torsion_divisibility_check(5, &c).unwrap().ok);
        // 5¹² ≡ 1 mod 7 passes; 5¹² ≡ 3 mod 11 fails, and p = 2 is exempt
        assert!(torsion_divisibility_from(7, &[5]).ok);
        let bad = torsion_divisibility_from(11, &[2, 5]);
        assert_eq!(bad.offending, vec![5]);
        assert!(prime_floor_ok(5, 7));
    }

    #[test]
    fn swapping_roles() {
        let c = cfg(-4, -7);
        let s = c.swapped();
        for m in 1..=4 {
            let a = phi_value(m, &c).unwrap().value;
            let b = phi_value(m, &s).unwrap().value;
            if m == 1 {
                assert_eq!(a, -b);
            } else {
                assert_eq!(a, b);
            }
        }
    }
}
