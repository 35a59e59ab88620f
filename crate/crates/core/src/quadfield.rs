//! The real quadratic field `F = ℚ(√D)`, `D = D1·D2`, and the unramified
//! extension `K = ℚ(√D1, √D2)` over it.
//!
//! Elements of the maximal order are written `(a + b√D)/2` with
//! `a ≡ b·D (mod 2)`. Internally they are also expressed in the basis
//! `1, ω` with `ω = (D + √D)/2`, whose minimal polynomial
//! `x² − D·x + (D² − D)/4` has simple roots modulo every prime not dividing
//! `D`. A prime of `F` above a split `p` is pinned down by a root `ρ` of that
//! polynomial modulo `p`, and valuations come from Hensel-lifting `ρ`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::arith::{factor, gcd, isqrt, val_i128};
use crate::numkernel::kronecker;
use crate::{Error, Result};

/// Class-number-one fundamental discriminants with their j-invariants.
pub const CLASS_NUMBER_ONE: [(i64, i64); 9] = [
    (-3, 0),
    (-4, 1728),
    (-7, -3375),
    (-8, 8000),
    (-11, -32768),
    (-19, -884736),
    (-43, -884736000),
    (-67, -147197952000),
    (-163, -262537412640768000),
];

/// j-invariant of the CM curve with fundamental discriminant `d`, if `d` has
/// class number one.
pub fn j_invariant(d: i64) -> Option<BigInt> {
    CLASS_NUMBER_ONE.iter().find(|(x, _)| *x == d).map(|(_, j)| BigInt::from(*j))
}

/// Half the number of units of the imaginary quadratic order of discriminant `d`.
pub fn half_units(d: i64) -> u64 {
    match d {
        -3 => 3,
        -4 => 2,
        _ => 1,
    }
}

/// Checks that `d` is a fundamental discriminant.
pub fn is_fundamental(d: i64) -> bool {
    let squarefree = |n: i64| factor(n.unsigned_abs()).iter().all(|&(_, e)| e == 1);
    match d.rem_euclid(4) {
        1 => squarefree(d),
        0 => {
            let q = d / 4;
            matches!(q.rem_euclid(4), 2 | 3) && squarefree(q)
        }
        _ => false,
    }
}

/// The global configuration: two coprime class-number-one discriminants.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscriminantPair {
    pub d1: i64,
    pub d2: i64,
    pub d: i64,
    pub w1: u64,
    pub w2: u64,
    pub j1: BigInt,
    pub j2: BigInt,
}

impl DiscriminantPair {
    pub fn new(d1: i64, d2: i64) -> Result<Self> {
        for d in [d1, d2] {
            if d >= 0 || !is_fundamental(d) {
                return Err(Error::InvalidConfig(format!("{d} is not a negative fundamental discriminant")));
            }
        }
        if gcd(d1, d2) != 1 {
            return Err(Error::InvalidConfig(format!("gcd({d1}, {d2}) != 1")));
        }
        let j1 = j_invariant(d1)
            .ok_or_else(|| Error::InvalidConfig(format!("{d1} does not have class number one")))?;
        let j2 = j_invariant(d2)
            .ok_or_else(|| Error::InvalidConfig(format!("{d2} does not have class number one")))?;
        Ok(Self { d1, d2, d: d1 * d2, w1: half_units(d1), w2: half_units(d2), j1, j2 })
    }

    /// The same pair with the roles of the two curves exchanged.
    pub fn swapped(&self) -> Self {
        Self::new(self.d2, self.d1).expect("swap of a valid pair is valid")
    }

    /// All ordered-by-|D1| pairs of distinct coprime class-number-one discriminants.
    pub fn all_pairs() -> Vec<Self> {
        let mut out = Vec::new();
        for (i, &(a, _)) in CLASS_NUMBER_ONE.iter().enumerate() {
            for &(b, _) in &CLASS_NUMBER_ONE[i + 1..] {
                if let Ok(c) = Self::new(a, b) {
                    out.push(c);
                }
            }
        }
        out
    }
}

impl fmt::Display for DiscriminantPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.d1, self.d2)
    }
}

/// `(a + b√D)/2` in the maximal order of `F`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldElement {
    pub a: i64,
    pub b: i64,
}

impl FieldElement {
    pub fn new(a: i64, b: i64, d: i64) -> Result<Self> {
        if (a - b * d).rem_euclid(2) != 0 {
            return Err(Error::Domain(format!("({a} + {b}√{d})/2 is not integral")));
        }
        Ok(Self { a, b })
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    /// `Nm(α) = (a² − b²D)/4`.
    pub fn norm(&self, d: i64) -> i128 {
        let (a, b) = (self.a as i128, self.b as i128);
        (a * a - b * b * d as i128) / 4
    }

    /// The Galois conjugate `(a − b√D)/2`.
    pub fn conjugate(&self) -> Self {
        Self { a: self.a, b: -self.b }
    }

    /// Coordinates `(u, v)` with `α = u + v·ω`, `ω = (D + √D)/2`.
    fn omega_coords(&self, d: i64) -> (i128, i128) {
        (((self.a as i128) - (self.b as i128) * d as i128) / 2, self.b as i128)
    }
}

/// Splitting type of a rational prime in `F/ℚ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PrimeKind {
    Split,
    Inert,
    Ramified,
}

/// A prime ideal of `F`.
///
/// For split primes `root` is the residue `ρ mod p` of the chosen root of
/// `x² − Dx + (D² − D)/4`; it is `0` otherwise. `plus` labels the prime whose
/// square root of `D` (namely `2ρ − D mod p`) lies in `(0, p/2)`; for `p = 2`
/// the prime with `ρ = 0` is the `plus` one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PrimeOfF {
    pub p: u64,
    pub kind: PrimeKind,
    pub root: u64,
    pub plus: bool,
    pub inert_in_k: bool,
}

impl PrimeOfF {
    /// Absolute norm `Nm(𝔭)`.
    pub fn norm(&self) -> u64 {
        match self.kind {
            PrimeKind::Inert => self.p * self.p,
            _ => self.p,
        }
    }

    /// The Galois-conjugate prime (itself unless split).
    pub fn conjugate(&self, d: i64) -> Self {
        if self.kind != PrimeKind::Split {
            return *self;
        }
        // roots of x² − Dx + c sum to D
        let other = (d as i128 - self.root as i128).rem_euclid(self.p as i128) as u64;
        Self { root: other, plus: !self.plus, ..*self }
    }
}

impl fmt::Display for PrimeOfF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            PrimeKind::Split => write!(f, "p{}{}", self.p, if self.plus { "+" } else { "-" }),
            PrimeKind::Inert => write!(f, "p{}", self.p),
            PrimeKind::Ramified => write!(f, "p{}r", self.p),
        }
    }
}

fn omega_poly(x: i128, d: i64, modulus: i128) -> i128 {
    let d = d as i128;
    let c = (d * d - d) / 4;
    ((x * x).rem_euclid(modulus) - (d * x).rem_euclid(modulus) + c).rem_euclid(modulus)
}

/// Inverse of `a` modulo `m` (`gcd(a, m) = 1`).
fn inv_mod(a: i128, m: i128) -> i128 {
    let (g, x, _) = crate::arith::ext_gcd((a.rem_euclid(m)) as i64, m as i64);
    debug_assert_eq!(g, 1);
    (x as i128).rem_euclid(m)
}

/// Lift a simple root `rho` of the ω-polynomial mod `p` to mod `p^e`.
fn hensel_lift(rho: u64, p: u64, e: u32, d: i64) -> i128 {
    let p = p as i128;
    let mut r = rho as i128;
    let mut modulus = p;
    for _ in 1..e {
        modulus *= p;
        let f = omega_poly(r, d, modulus);
        let df = (2 * r - d as i128).rem_euclid(modulus);
        r = (r - f * inv_mod(df, modulus)).rem_euclid(modulus);
    }
    r
}

/// All primes of `F` above `p`, with their splitting in `K/F`.
pub fn prime_profile(p: u64, cfg: &DiscriminantPair) -> Vec<PrimeOfF> {
    let d = cfg.d;
    match kronecker(d, p as i64) {
        1 => {
            let inert = kronecker(cfg.d1, p as i64) == -1;
            let roots: Vec<u64> = (0..p).filter(|&x| omega_poly(x as i128, d, p as i128) == 0).collect();
            debug_assert_eq!(roots.len(), 2);
            let is_plus = |rho: u64| {
                if p == 2 {
                    rho == 0
                } else {
                    let r = (2 * rho as i128 - d as i128).rem_euclid(p as i128);
                    2 * r < p as i128
                }
            };
            let mut out: Vec<PrimeOfF> = roots
                .into_iter()
                .map(|rho| PrimeOfF { p, kind: PrimeKind::Split, root: rho, plus: is_plus(rho), inert_in_k: inert })
                .collect();
            out.sort_by_key(|q| !q.plus);
            out
        }
        -1 => vec![PrimeOfF { p, kind: PrimeKind::Inert, root: 0, plus: true, inert_in_k: false }],
        _ => {
            let other = if cfg.d1 % p as i64 == 0 { cfg.d2 } else { cfg.d1 };
            let inert = kronecker(other, p as i64) == -1;
            vec![PrimeOfF { p, kind: PrimeKind::Ramified, root: 0, plus: true, inert_in_k: inert }]
        }
    }
}

/// `ord_𝔭(α)`.
pub fn valuation(alpha: &FieldElement, q: &PrimeOfF, d: i64) -> Result<u32> {
    if alpha.is_zero() {
        return Err(Error::ZeroElement);
    }
    let n = alpha.norm(d);
    let vn = val_i128(n, q.p);
    Ok(match q.kind {
        PrimeKind::Inert => vn / 2,
        PrimeKind::Ramified => vn,
        PrimeKind::Split => {
            if vn == 0 {
                return Ok(0);
            }
            // α ≡ u + v·ρ (mod 𝔭^e) for the lifted root ρ; the valuation is at most vn
            let e = vn + 1;
            let modulus = (q.p as i128).pow(e);
            let rho = hensel_lift(q.root, q.p, e, d);
            let (u, v) = alpha.omega_coords(d);
            let x = (u.rem_euclid(modulus) + (v.rem_euclid(modulus) * rho) % modulus).rem_euclid(modulus);
            if x == 0 {
                e
            } else {
                val_i128(x, q.p).min(vn)
            }
        }
    })
}

/// Prime-ideal factorization of a principal ideal.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealFactorization {
    pub factors: BTreeMap<PrimeOfF, u32>,
}

impl IdealFactorization {
    /// Absolute norm `∏ Nm(𝔭)^e`.
    pub fn norm(&self) -> u128 {
        self.factors.iter().map(|(q, &e)| (q.norm() as u128).pow(e)).product()
    }

    /// Exponent at `q` (0 if absent).
    pub fn exponent(&self, q: &PrimeOfF) -> u32 {
        self.factors.get(q).copied().unwrap_or(0)
    }

    /// Divide by `q^e`; `None` when the quotient is not integral.
    pub fn divide(&self, q: &PrimeOfF, e: u32) -> Option<Self> {
        let have = self.exponent(q);
        if have < e {
            return None;
        }
        let mut out = self.clone();
        if have == e {
            out.factors.remove(q);
        } else {
            out.factors.insert(*q, have - e);
        }
        Some(out)
    }
}

/// Factor the principal ideal `(α)`.
pub fn factor_element(alpha: &FieldElement, cfg: &DiscriminantPair) -> Result<IdealFactorization> {
    if alpha.is_zero() {
        return Err(Error::ZeroElement);
    }
    let n = alpha.norm(cfg.d).unsigned_abs();
    let mut factors = BTreeMap::new();
    for (p, _) in factor(n as u64) {
        for q in prime_profile(p, cfg) {
            let e = valuation(alpha, &q, cfg.d)?;
            if e > 0 {
                factors.insert(q, e);
            }
        }
    }
    Ok(IdealFactorization { factors })
}

/// The ideal counting function `ρ_{K/F}` (number of ideals of `K` of the
/// given relative norm).
pub fn rho_kf(ideal: &IdealFactorization, cfg: &DiscriminantPair) -> Result<u64> {
    let mut r = 1u64;
    for (q, &e) in &ideal.factors {
        if q.kind == PrimeKind::Ramified && cfg.d1 % q.p as i64 == 0 && cfg.d2 % q.p as i64 == 0 {
            return Err(Error::RamifiedInKF(q.p));
        }
        if q.inert_in_k {
            if e % 2 == 1 {
                return Ok(0);
            }
        } else {
            r *= e as u64 + 1;
        }
    }
    Ok(r)
}

/// The totally positive `t` with `tr(t) = m`, as the integral elements
/// `t√D = (a + m√D)/2`, `a ≡ mD (mod 2)`, `|a| < m√D`, in increasing `a`.
pub fn enumerate_trace_m(m: u64, cfg: &DiscriminantPair) -> Vec<FieldElement> {
    if m == 0 {
        return Vec::new();
    }
    let m = m as i64;
    let bound = (m as i128) * (m as i128) * cfg.d as i128;
    let amax = isqrt(bound - 1) as i64;
    (-amax..=amax)
        .filter(|&a| (a - m * cfg.d).rem_euclid(2) == 0 && (a as i128) * (a as i128) < bound)
        .map(|a| FieldElement { a, b: m })
        .collect()
}

/// Primes inert in `K` at which `t√D` has odd valuation.
pub fn diff_set(t_sqrt_d: &FieldElement, cfg: &DiscriminantPair) -> Result<Vec<PrimeOfF>> {
    let f = factor_element(t_sqrt_d, cfg)?;
    Ok(f.factors.iter().filter(|(q, &e)| q.inert_in_k && e % 2 == 1).map(|(q, _)| *q).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(a: i64, b: i64) -> DiscriminantPair {
        DiscriminantPair::new(a, b).unwrap()
    }

    #[test]
    fn pair_validation() {
        let c = cfg(-3, -4);
        assert_eq!((c.d, c.w1, c.w2), (12, 3, 2));
        assert!(DiscriminantPair::new(-4, -8).is_err());
        assert!(DiscriminantPair::new(-3, -15).is_err());
        assert!(DiscriminantPair::new(-12, -7).is_err());
        assert!(is_fundamental(-163) && is_fundamental(-8) && !is_fundamental(-16));
    }

    #[test]
    fn profiles() {
        let c = cfg(-3, -4);
        let p11 = prime_profile(11, &c);
        assert_eq!(p11.len(), 2);
        assert!(p11.iter().all(|q| q.kind == PrimeKind::Split && q.inert_in_k));
        assert!(p11[0].plus && !p11[1].plus);
        // 13 splits in ℚ(√3) (12 ≡ 5² mod 13) and in ℚ(√−3)
        let p13 = prime_profile(13, &c);
        assert_eq!(p13.len(), 2);
        assert!(p13.iter().all(|q| q.kind == PrimeKind::Split && !q.inert_in_k));
        let p5 = prime_profile(5, &c);
        assert_eq!(p5.len(), 1);
        assert_eq!(p5[0].kind, PrimeKind::Inert);
        assert!(!p5[0].inert_in_k);
        let p3 = prime_profile(3, &c);
        assert_eq!(p3[0].kind, PrimeKind::Ramified);
        assert!(p3[0].inert_in_k);
    }

    #[test]
    fn valuations_and_factorizations() {
        let c = cfg(-3, -4);
        let sqrt3 = FieldElement::new(0, 1, 12).unwrap();
        let one_plus = FieldElement::new(2, 1, 12).unwrap();
        let p3 = prime_profile(3, &c)[0];
        let p2 = prime_profile(2, &c)[0];
        assert_eq!(valuation(&sqrt3, &p3, 12).unwrap(), 1);
        assert_eq!(valuation(&one_plus, &p2, 12).unwrap(), 1);
        assert_eq!(valuation(&FieldElement::new(2, 0, 12).unwrap(), &p3, 12).unwrap(), 0);
        assert!(matches!(valuation(&FieldElement { a: 0, b: 0 }, &p3, 12), Err(Error::ZeroElement)));

        let f = factor_element(&sqrt3, &c).unwrap();
        assert_eq!(f.factors.into_iter().collect::<Vec<_>>(), vec![(p3, 1)]);
        let f = factor_element(&one_plus, &c).unwrap();
        assert_eq!(f.factors.into_iter().collect::<Vec<_>>(), vec![(p2, 1)]);
        let f = factor_element(&FieldElement::new(4, 0, 12).unwrap(), &c).unwrap();
        assert_eq!(f.factors.into_iter().collect::<Vec<_>>(), vec![(p2, 2)]);
    }

    #[test]
    fn split_valuation_distinguishes_conjugates() {
        // 1 + √12 has norm −11, so exactly one prime above 11 divides it
        let c = cfg(-3, -4);
        let gamma = FieldElement::new(2, 2, 12).unwrap();
        assert_eq!(gamma.norm(12), -11);
        let qs = prime_profile(11, &c);
        let v: Vec<u32> = qs.iter().map(|q| valuation(&gamma, q, 12).unwrap()).collect();
        assert_eq!(v.iter().sum::<u32>(), 1);
        let vc: Vec<u32> = qs.iter().map(|q| valuation(&gamma.conjugate(), q, 12).unwrap()).collect();
        assert_eq!(vc, vec![v[1], v[0]]);
        // conjugate prime matches
        assert_eq!(qs[0].conjugate(12), qs[1]);
    }

    #[test]
    fn split_at_two() {
        // D = 33 ≡ 1 mod 8: 2 splits
        let c = cfg(-3, -11);
        let qs = prime_profile(2, &c);
        assert_eq!(qs.len(), 2);
        // (1 + √33)/2 has norm −8
        let alpha = FieldElement::new(1, 1, 33).unwrap();
        let f = factor_element(&alpha, &c).unwrap();
        assert_eq!(f.norm(), 8);
        assert_eq!(f.factors.len(), 1);
    }

    #[test]
    fn rho_examples() {
        let c = cfg(-3, -4);
        assert_eq!(rho_kf(&IdealFactorization::default(), &c).unwrap(), 1);
        let p3 = prime_profile(3, &c)[0];
        let p13 = prime_profile(13, &c)[0];
        assert!(!p13.inert_in_k);
        let one = |q: PrimeOfF, e: u32| IdealFactorization { factors: [(q, e)].into_iter().collect() };
        assert_eq!(rho_kf(&one(p3, 1), &c).unwrap(), 0);
        assert_eq!(rho_kf(&one(p3, 2), &c).unwrap(), 1);
        assert_eq!(rho_kf(&one(p13, 3), &c).unwrap(), 4);
    }

    #[test]
    fn trace_enumeration() {
        let c = cfg(-3, -4);
        let a: Vec<i64> = enumerate_trace_m(1, &c).iter().map(|t| t.a).collect();
        assert_eq!(a, vec![-2, 0, 2]);
        let c21 = cfg(-3, -7);
        let a: Vec<i64> = enumerate_trace_m(1, &c21).iter().map(|t| t.a).collect();
        assert_eq!(a, vec![-3, -1, 1, 3]);
        assert!(enumerate_trace_m(0, &c).is_empty());
    }

    #[test]
    fn diff_examples() {
        let c = cfg(-3, -4);
        let d = diff_set(&FieldElement::new(0, 1, 12).unwrap(), &c).unwrap();
        assert_eq!(d, prime_profile(3, &c));
        let d = diff_set(&FieldElement::new(2, 1, 12).unwrap(), &c).unwrap();
        assert_eq!(d, prime_profile(2, &c));
    }
}
