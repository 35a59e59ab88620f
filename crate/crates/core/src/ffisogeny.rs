//! Minimal isogeny degrees between the supersingular reductions of the two
//! CM curves, read off from `φ_m(j1, j2) mod p`.

use std::collections::BTreeMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, primes_up_to};
use crate::modpoly::{phi_value, pi_set_from, value_mod, Cache, EvalCertificate};
use crate::numkernel::special::kronecker;
use crate::quadfield::DiscriminantPair;
use crate::{Error, Result};

/// Reduction data of the pair at `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupersingularConfig {
    pub p: u64,
    pub j1_mod: u64,
    pub j2_mod: u64,
    pub supersingular: bool,
}

/// `p` divides `6·D1·D2`.
pub fn is_bad_prime(p: u64, cfg: &DiscriminantPair) -> bool {
    let n = 6 * cfg.d1.unsigned_abs() * cfg.d2.unsigned_abs();
    n % p == 0
}

/// Both curves are supersingular mod `p` exactly when `p` is inert in both
/// CM fields.
pub fn supersingular_config(p: u64, cfg: &DiscriminantPair) -> Result<SupersingularConfig> {
    if !is_prime(p) {
        return Err(Error::Domain(format!("{p} is not prime")));
    }
    if is_bad_prime(p, cfg) {
        return Err(Error::BadPrime(p));
    }
    Ok(SupersingularConfig {
        p,
        j1_mod: value_mod(&cfg.j1, p),
        j2_mod: value_mod(&cfg.j2, p),
        supersingular: kronecker(cfg.d1, p as i64) == -1 && kronecker(cfg.d2, p as i64) == -1,
    })
}

/// `⌊p^{2/3}/2 + 1/4⌋`, computed exactly: the largest `b` with
/// `(4b − 1)³ <= 8p²`.
pub fn elkies_bound(p: u64) -> u64 {
    let target = 8 * (p as u128) * (p as u128);
    let mut b = ((p as f64).powf(2.0 / 3.0) / 2.0 + 0.25).floor() as u64 + 2;
    while b > 0 && (4 * b as u128 - 1).pow(3) > target {
        b -= 1;
    }
    b
}

/// Memoized `φ_m(j1, j2)` for one configuration, optionally backed by the
/// on-disk cache.
pub struct PhiValues<'a> {
    cfg: DiscriminantPair,
    cache: Option<&'a Cache>,
    values: Mutex<BTreeMap<u64, BigInt>>,
}

impl<'a> PhiValues<'a> {
    pub fn new(cfg: &DiscriminantPair) -> Self {
        Self { cfg: cfg.clone(), cache: None, values: Mutex::new(BTreeMap::new()) }
    }

    pub fn with_cache(cfg: &DiscriminantPair, cache: &'a Cache) -> Self {
        Self { cfg: cfg.clone(), cache: Some(cache), values: Mutex::new(BTreeMap::new()) }
    }

    pub fn cfg(&self) -> &DiscriminantPair {
        &self.cfg
    }

    pub fn certificate(&self, m: u64) -> Result<EvalCertificate> {
        if let Some(cache) = self.cache {
            if let Some(c) = cache.get(self.cfg.d1, self.cfg.d2, m)? {
                return Ok(c);
            }
        }
        let cert = phi_value(m, &self.cfg)?;
        if let Some(cache) = self.cache {
            cache.put(self.cfg.d1, self.cfg.d2, &cert)?;
        }
        Ok(cert)
    }

    pub fn get(&self, m: u64) -> Result<BigInt> {
        if let Some(v) = self.values.lock().unwrap().get(&m) {
            return Ok(v.clone());
        }
        let v = self.certificate(m)?.value;
        self.values.lock().unwrap().insert(m, v.clone());
        Ok(v)
    }
}

/// The minimal degree found at one prime, with the bound it must respect.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeRecord {
    pub p: u64,
    pub j1: u64,
    pub j2: u64,
    pub m_min: u64,
    pub bound: u64,
    pub within_bound: bool,
}

/// The least `m` (`m >= 2` when the reductions coincide, since degree-one
/// maps are isomorphisms) with `φ_m(j1, j2) ≡ 0 mod p`. Minimal-degree
/// isogenies have cyclic kernel, so scanning cyclic `φ_m` loses nothing.
///
/// The scan runs past the Elkies bound, up to `2p`: when the reductions
/// coincide the bound (stated for maps between curves) can be smaller than
/// every non-isomorphic self-isogeny, e.g. `p = 5`, bound 1.
pub fn min_isogeny_degree(p: u64, values: &PhiValues) -> Result<DegreeRecord> {
    let sc = supersingular_config(p, values.cfg())?;
    if !sc.supersingular {
        return Err(Error::Domain(format!("p = {p} is not supersingular for ({}, {})", values.cfg().d1, values.cfg().d2)));
    }
    let bound = elkies_bound(p);
    let start = if sc.j1_mod == sc.j2_mod { 2 } else { 1 };
    for m in (start..=2 * p).filter(|m| m % p != 0) {
        if value_mod(&values.get(m)?, p) == 0 {
            return Ok(DegreeRecord { p, j1: sc.j1_mod, j2: sc.j2_mod, m_min: m, bound, within_bound: m <= bound });
        }
    }
    Err(Error::NotFound { p, bound: 2 * p })
}

/// All good supersingular primes up to `p_max`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElkiesAudit {
    pub schema: u32,
    #[serde(rename = "D1")]
    pub d1: i64,
    #[serde(rename = "D2")]
    pub d2: i64,
    pub p_max: u64,
    pub records: Vec<DegreeRecord>,
    pub all_within_bound: bool,
    /// Primes where the two reductions coincide (`j1 ≡ j2`).
    pub coincident: Vec<u64>,
    /// `max log m_min / log p` over the records (0 when `m_min = 1`).
    pub max_exponent: f64,
    pub mean_exponent: f64,
}

pub fn elkies_audit(p_max: u64, values: &PhiValues) -> Result<ElkiesAudit> {
    let cfg = values.cfg();
    let mut records = Vec::new();
    for p in primes_up_to(p_max) {
        if is_bad_prime(p, cfg) || !supersingular_config(p, cfg)?.supersingular {
            continue;
        }
        records.push(min_isogeny_degree(p, values)?);
    }
    let exps: Vec<f64> = records.iter().map(|r| (r.m_min as f64).ln() / (r.p as f64).ln()).collect();
    Ok(ElkiesAudit {
        schema: 1,
        d1: cfg.d1,
        d2: cfg.d2,
        p_max,
        all_within_bound: records.iter().all(|r| r.within_bound),
        coincident: records.iter().filter(|r| r.j1 == r.j2).map(|r| r.p).collect(),
        max_exponent: exps.iter().copied().fold(0.0, f64::max),
        mean_exponent: if exps.is_empty() { 0.0 } else { exps.iter().sum::<f64>() / exps.len() as f64 },
        records,
    })
}

/// The two counting functions of the dichotomy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DichotomyCounts {
    pub schema: u32,
    pub x: f64,
    pub delta: f64,
    pub eta: f64,
    #[serde(rename = "C")]
    pub c: f64,
    /// `#{p <= x good supersingular : m_min(p) <= p^{2/3−δ}}`.
    pub count1: u64,
    /// `#{m <= x : #π(m) >= C·m^{1−η}}`.
    pub count2: u64,
}

pub fn dichotomy_counts(x: f64, delta: f64, eta: f64, c: f64, values: &PhiValues) -> Result<DichotomyCounts> {
    if !(delta > 0.0 && delta < 2.0 / 3.0 && eta > 0.0 && eta < 0.5 && c > 0.0) {
        return Err(Error::Domain("need 0 < δ < 2/3, 0 < η < 1/2, C > 0".into()));
    }
    let cfg = values.cfg();
    let top = if x >= 2.0 { x.floor() as u64 } else { 0 };
    let mut count1 = 0;
    for p in primes_up_to(top) {
        if is_bad_prime(p, cfg) || !supersingular_config(p, cfg)?.supersingular {
            continue;
        }
        let r = min_isogeny_degree(p, values)?;
        if (r.m_min as f64) <= (p as f64).powf(2.0 / 3.0 - delta) {
            count1 += 1;
        }
    }
    let mut count2 = 0;
    for m in 1..=top {
        let pi = pi_set_from(m, &values.get(m)?, cfg);
        if pi.len() as f64 >= c * (m as f64).powf(1.0 - eta) {
            count2 += 1;
        }
    }
    Ok(DichotomyCounts { schema: 1, x, delta, eta, c, count1, count2 })
}
