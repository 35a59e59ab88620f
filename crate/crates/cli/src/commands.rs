//! One function per subcommand. Each fills a [`Report`]; assertions that fail
//! are recorded as failure records rather than aborting the run.

use std::path::Path;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use singmod::arith::prime_divisors;
use singmod::eisenstein::{
    ck_coeff_from, ck_support, est_identity, matching_identity, weighted_log_sum, CoefficientRecord, TraceTable,
    WEIGHTS,
};
use singmod::ffisogeny::{dichotomy_counts, elkies_audit, min_isogeny_degree, PhiValues};
use singmod::green::gkz_verify;
use singmod::modpoly::{phi_value, pi_set_from, valuation_ledger, Cache};
use singmod::petersson::{corpus, measure, theorem_audit};
use singmod::quadfield::{enumerate_trace_m, prime_profile};
use singmod::DiscriminantPair;

use crate::output::Report;

/// Fraction of cached records recomputed from scratch on every run.
pub const REVERIFY_FRACTION: f64 = 0.1;
const REVERIFY_SEED: u64 = 0x00c0_ffee;

fn values<'a>(cfg: &DiscriminantPair, cache: Option<&'a Cache>) -> PhiValues<'a> {
    match cache {
        Some(c) => PhiValues::with_cache(cfg, c),
        None => PhiValues::new(cfg),
    }
}

pub fn pi_set(r: &mut Report, pairs: &[DiscriminantPair], ms: &[u64], cache: Option<&Cache>) -> anyhow::Result<()> {
    for cfg in pairs {
        let v = values(cfg, cache);
        for &m in ms {
            let value = v.get(m)?;
            let pi = pi_set_from(m, &value, cfg);
            r.check(!pi.is_empty(), json!({"D1": cfg.d1, "D2": cfg.d2, "m": m, "reason": "empty prime set"}));
            r.row(json!({"D1": cfg.d1, "D2": cfg.d2, "m": m, "value": value.to_string(), "pi": pi}));
        }
    }
    Ok(())
}

pub fn gz_ledger(r: &mut Report, pairs: &[DiscriminantPair], m_max: u64, cache: Option<&Cache>) -> anyhow::Result<()> {
    for cfg in pairs {
        let v = values(cfg, cache);
        for m in 1..=m_max {
            for e in valuation_ledger(m, cfg, &v.get(m)?)? {
                let row = json!({"D1": cfg.d1, "D2": cfg.d2, "m": e.m, "p": e.p, "predicted": e.predicted, "observed": e.observed});
                r.check(e.predicted == e.observed, &row);
                if e.predicted != 0 || e.observed != 0 {
                    r.row(row);
                }
            }
        }
    }
    Ok(())
}

pub fn gkz(r: &mut Report, pairs: &[DiscriminantPair], ks: &[u32], m_max: u64, tol: f64) -> anyhow::Result<()> {
    for cfg in pairs {
        for &k in ks {
            for m in 1..=m_max {
                let rep = gkz_verify(k, m, cfg, tol * 1e-4)?;
                let ok = rep.rel_err < tol;
                r.check(ok, &rep);
                r.row(rep);
            }
        }
    }
    Ok(())
}

pub fn est_check(r: &mut Report, pairs: &[DiscriminantPair], o_max: u32, m_max: u64) -> anyhow::Result<()> {
    for o in 0..=o_max {
        let e = est_identity(o);
        r.check(e.holds, &e);
        r.row(e);
    }
    let mut pairs_checked = 0u64;
    for cfg in pairs {
        for m in 1..=m_max {
            for t in enumerate_trace_m(m, cfg) {
                for p in prime_divisors(t.norm(cfg.d).unsigned_abs() as u64) {
                    for q in prime_profile(p, cfg).into_iter().filter(|q| q.inert_in_k) {
                        let (lhs, rhs) = matching_identity(&t, &q, cfg)?;
                        pairs_checked += 1;
                        r.check(
                            lhs == rhs,
                            json!({"D1": cfg.d1, "D2": cfg.d2, "m": m, "a": t.a, "prime": q.to_string(), "lhs": lhs, "rhs": rhs}),
                        );
                    }
                }
            }
        }
    }
    r.note("matching_pairs_checked", pairs_checked);
    Ok(())
}

pub fn petersson_audit(r: &mut Report, level: u64, weight: u32, ys: &[f64], rel_tol: f64) -> anyhow::Result<()> {
    let Some(f) = corpus(400).into_iter().find(|f| f.level == level && f.weight == weight) else {
        anyhow::bail!("no corpus form of level {level} and weight {weight} (available: 1/12, 11/2, 4/6)");
    };
    let m = measure(&f, rel_tol)?;
    for &y in ys {
        let a = theorem_audit(&f, y, &m)?;
        r.check(a.inequality_ok, &a);
        r.row(a);
    }
    Ok(())
}

pub fn min_degree(r: &mut Report, pairs: &[DiscriminantPair], p: u64, cache: Option<&Cache>) -> anyhow::Result<()> {
    for cfg in pairs {
        let rec = min_isogeny_degree(p, &values(cfg, cache))?;
        r.row(json!({"D1": cfg.d1, "D2": cfg.d2, "p": rec.p, "j1": rec.j1, "j2": rec.j2, "m_min": rec.m_min, "bound": rec.bound}));
    }
    Ok(())
}

pub fn elkies(r: &mut Report, pairs: &[DiscriminantPair], p_max: u64, cache: Option<&Cache>) -> anyhow::Result<()> {
    for cfg in pairs {
        let a = elkies_audit(p_max, &values(cfg, cache))?;
        for rec in &a.records {
            let row = json!({"D1": cfg.d1, "D2": cfg.d2, "p": rec.p, "j1": rec.j1, "j2": rec.j2, "m_min": rec.m_min, "bound": rec.bound});
            r.check(rec.within_bound, &row);
            r.row(row);
        }
        r.note(&format!("max_exponent({},{})", cfg.d1, cfg.d2), a.max_exponent);
    }
    Ok(())
}

pub fn dichotomy(
    r: &mut Report,
    pairs: &[DiscriminantPair],
    (x, delta, eta, c): (f64, f64, f64, f64),
    cache: Option<&Cache>,
) -> anyhow::Result<()> {
    for cfg in pairs {
        let d = dichotomy_counts(x, delta, eta, c, &values(cfg, cache))?;
        r.row(json!({"D1": cfg.d1, "D2": cfg.d2, "x": d.x, "delta": d.delta, "eta": d.eta, "C": d.c, "count1": d.count1, "count2": d.count2}));
    }
    Ok(())
}

/// The weighted coefficient sums only see primes of `π(m)`: every nonzero
/// `c_k(m; p^{2r+1})` sits at some `p ∈ π(m)`, and every `p ∈ π(m)` carries one.
pub fn bound_ledger(r: &mut Report, pairs: &[DiscriminantPair], m_max: u64, cache: Option<&Cache>) -> anyhow::Result<()> {
    for cfg in pairs {
        let v = values(cfg, cache);
        for m in 1..=m_max {
            let pi = pi_set_from(m, &v.get(m)?, cfg);
            let mut support = std::collections::BTreeSet::new();
            for k in WEIGHTS {
                let (sum, primes) = weighted_log_sum(m, k, cfg)?;
                let primes: Vec<u64> = primes.into_iter().filter(|p| m % p != 0).collect();
                support.extend(primes.iter().copied());
                let ok = primes.iter().all(|p| pi.contains(p));
                let row = json!({"D1": cfg.d1, "D2": cfg.d2, "m": m, "k": k, "weighted_sum": sum, "primes": primes, "pi": pi});
                r.check(ok, &row);
                r.row(row);
            }
            let missing: Vec<u64> = pi.iter().copied().filter(|p| !support.contains(p)).collect();
            r.check(missing.is_empty(), json!({"D1": cfg.d1, "D2": cfg.d2, "m": m, "pi_without_coefficient": missing}));
        }
    }
    Ok(())
}

pub fn coefficients(r: &mut Report, pairs: &[DiscriminantPair], m: u64, ks: &[u32]) -> anyhow::Result<()> {
    for cfg in pairs {
        let table = TraceTable::new(m, cfg)?;
        for &k in ks {
            for ((p, rr), value) in ck_support(&table, k, cfg)? {
                let direct = ck_coeff_from(&table, p, rr, k, cfg)?;
                r.check(direct == value, json!({"D1": cfg.d1, "D2": cfg.d2, "m": m, "p": p, "r": rr, "k": k}));
                let mut row = serde_json::to_value(CoefficientRecord::new(m, p, rr, k, &value))?;
                row["D1"] = json!(cfg.d1);
                row["D2"] = json!(cfg.d2);
                r.rows.push(row);
            }
        }
    }
    Ok(())
}

/// Recompute a deterministic sample of the cached certificates and demand
/// exact agreement with the stored values.
pub fn reverify_cache(r: &mut Report, dir: &Path) -> anyhow::Result<()> {
    let cache = Cache::open(dir)?;
    let records = cache.records()?;
    if records.is_empty() {
        return Ok(());
    }
    let n = ((records.len() as f64 * REVERIFY_FRACTION).ceil() as usize).min(records.len());
    let mut rng = ChaCha8Rng::seed_from_u64(REVERIFY_SEED);
    let mut picked = sample(&mut rng, records.len(), n).into_vec();
    picked.sort_unstable();
    for i in picked {
        let rec = &records[i];
        let cfg = DiscriminantPair::new(rec.d1, rec.d2)?;
        let stored = rec.certificate()?;
        let fresh = phi_value(rec.m, &cfg)?;
        r.check(
            stored.value == fresh.value,
            json!({"cache_record": [rec.d1, rec.d2, rec.m], "stored": rec.value, "fresh": fresh.value.to_string()}),
        );
    }
    r.note("cache_reverified", n);
    Ok(())
}
