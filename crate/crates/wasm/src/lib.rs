//! Browser bindings: the prime set `π(m)`, minimal isogeny degrees mod `p`,
//! and the cusps of `Γ0(N)`. Every export returns a JSON string; the plain
//! functions underneath are what the native tests exercise.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use singmod::ffisogeny::{min_isogeny_degree, PhiValues};
use singmod::modpoly::{phi_value, pi_set_from};
use singmod::petersson::{cusps, index_gamma0, psi_vol};
use singmod::DiscriminantPair;

pub const M_MAX: u32 = 40;
pub const P_MAX: u32 = 2000;
pub const N_MAX: u32 = 100_000;

fn pair(d1: i32, d2: i32) -> Result<DiscriminantPair, String> {
    DiscriminantPair::new(d1 as i64, d2 as i64).map_err(|e| e.to_string())
}

/// `φ_m(j1, j2)` as a decimal string and the primes of `π(m)`.
pub fn pi_set(d1: i32, d2: i32, m: u32) -> Result<Value, String> {
    if !(1..=M_MAX).contains(&m) {
        return Err(format!("m must lie in 1..={M_MAX}"));
    }
    let cfg = pair(d1, d2)?;
    let cert = phi_value(m as u64, &cfg).map_err(|e| e.to_string())?;
    let pi = pi_set_from(m as u64, &cert.value, &cfg);
    Ok(json!({"D1": d1, "D2": d2, "m": m, "value": cert.value.to_string(), "precision_bits": cert.precision_bits, "pi": pi}))
}

/// The least degree of a non-isomorphic isogeny between the reductions mod `p`.
pub fn min_degree(d1: i32, d2: i32, p: u32) -> Result<Value, String> {
    if p > P_MAX {
        return Err(format!("p must be at most {P_MAX}"));
    }
    let cfg = pair(d1, d2)?;
    let r = min_isogeny_degree(p as u64, &PhiValues::new(&cfg)).map_err(|e| e.to_string())?;
    serde_json::to_value(r).map_err(|e| e.to_string())
}

/// Cusp representatives with widths, the index and the volume `ψ(N)·N`.
pub fn cusp_table(n: u32) -> Result<Value, String> {
    if !(1..=N_MAX).contains(&n) {
        return Err(format!("N must lie in 1..={N_MAX}"));
    }
    let n = n as u64;
    let vol = psi_vol(n).map_err(|e| e.to_string())?;
    Ok(json!({"N": n, "index": index_gamma0(n), "psi_vol": vol, "cusps": cusps(n)}))
}

fn export(r: Result<Value, String>) -> Result<String, JsError> {
    r.map(|v| v.to_string()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn pi_set_json(d1: i32, d2: i32, m: u32) -> Result<String, JsError> {
    export(pi_set(d1, d2, m))
}

#[wasm_bindgen]
pub fn min_degree_json(d1: i32, d2: i32, p: u32) -> Result<String, JsError> {
    export(min_degree(d1, d2, p))
}

#[wasm_bindgen]
pub fn cusps_json(n: u32) -> Result<String, JsError> {
    export(cusp_table(n))
}
