//! Petersson norm, sup norm and the audit of the norm inequality.

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::cusps::{cusp_tail_volume, index_gamma0, VOLUME_SEED};
use super::forms::{i_f, s_f, FormData};
use crate::arith::{divisors, ext_gcd, gcd};
use crate::numkernel::quadrature::integrate_with_limit;
use crate::numkernel::special::rational_to_f64;
use crate::{Error, Result};

/// Right coset representatives of `Γ0(N)` in `SL_2(ℤ)`, one per point of
/// `ℙ¹(ℤ/N)`, as `[a, b, c, d]`.
pub fn coset_representatives(n: u64) -> Vec<[i64; 4]> {
    let n = n as i64;
    if n == 1 {
        return vec![[1, 0, 0, 1]];
    }
    let units: Vec<i64> = (1..n).filter(|&u| gcd(u, n) == 1).collect();
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for c in 0..n {
        for d in 0..n {
            if gcd(gcd(c, d), n) != 1 {
                continue;
            }
            let canon = units.iter().map(|&u| (u * c % n, u * d % n)).min().unwrap();
            if !seen.insert(canon) {
                continue;
            }
            // lift to a coprime integer pair, then complete to SL_2(ℤ)
            let (cc, dd) = (0..)
                .flat_map(|i| (0..=i).map(move |j| (c + n * j, d + n * (i - j))))
                .find(|&(x, y)| gcd(x, y) == 1)
                .unwrap();
            let (_, a, b) = ext_gcd(dd, -cc);
            out.push([a, b, cc, dd]);
        }
    }
    debug_assert_eq!(out.len() as u64, index_gamma0(n as u64));
    out
}

fn act(m: &[i64; 4], x: f64, y: f64) -> (f64, f64) {
    let [a, b, c, d] = m.map(|v| v as f64);
    let (re, im) = (c * x + d, c * y);
    let den = re * re + im * im;
    (((a * x + b) * re + a * y * im) / den, y / den)
}

/// `Σ_i |f|²y^κ (γ_i z)` over the coset representatives.
fn coset_trace(f: &FormData, reps: &[[i64; 4]], x: f64, y: f64) -> Result<f64> {
    let mut s = 0.0;
    for g in reps {
        let (gx, gy) = act(g, x, y);
        s += f.density(gx, gy)?;
    }
    Ok(s)
}

/// A Petersson norm `‖f‖²` with its quadrature error estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormValue {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// `‖f‖² = [SL_2 : Γ0(N)]^{-1} ∫_{ℱ_N} |f|² y^{κ−2} dx dy`, with
/// `ℱ_N = ⋃ γ_i ℱ_1`. Written over `ℱ_1` in the variables `(x, u = 1/y)`
/// (so `dx dy/y² = dx du`), the integrand is the coset trace of the
/// invariant density on `−½ <= x <= ½`, `0 <= u <= (1 − x²)^{−1/2}`, and
/// nested adaptive Gauss–Kronrod reaches relative accuracy `rel_tol`.
pub fn petersson_numeric(f: &FormData, rel_tol: f64) -> Result<NormValue> {
    if f.is_zero() {
        return Ok(NormValue { value: 0.0, error: 0.0, evaluations: 0 });
    }
    let reps = coset_representatives(f.level);
    let failure = std::cell::RefCell::new(None::<Error>);
    let evals = std::cell::Cell::new(0usize);
    let inner = |x: f64, tol: f64, panels: usize| {
        let top = 1.0 / (1.0 - x * x).sqrt();
        let g = |u: f64| {
            if u <= 0.0 {
                return 0.0;
            }
            match coset_trace(f, &reps, x, 1.0 / u) {
                Ok(v) => v,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    0.0
                }
            }
        };
        let r = integrate_with_limit(&g, 0.0, top, tol, panels);
        evals.set(evals.get() + r.evaluations);
        r
    };
    // a coarse pass fixes the absolute scale of the tolerances
    let coarse = integrate_with_limit(&|x: f64| inner(x, 0.0, 16).value, -0.5, 0.5, 0.0, 1).value.abs();
    let abs_tol = rel_tol * coarse.max(f64::MIN_POSITIVE);
    let inner_ok = std::cell::Cell::new(true);
    let outer = integrate_with_limit(
        &|x: f64| {
            let r = inner(x, 0.1 * abs_tol, 2000);
            if !r.converged {
                inner_ok.set(false);
            }
            r.value
        },
        -0.5,
        0.5,
        abs_tol,
        2000,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    if !outer.converged || !inner_ok.get() {
        return Err(Error::QuadratureNonConvergence(format!("Petersson norm of {}", f.name)));
    }
    let index = reps.len() as f64;
    Ok(NormValue { value: outer.value / index, error: (outer.error + 0.1 * abs_tol) / index, evaluations: evals.get() })
}

/// `sup_z (Im z)^{κ/2}|f(z)|`, located by a grid over `ℱ_1` for every coset
/// followed by a compass search around the best point. A lower estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupNorm {
    pub value: f64,
    /// Maximizer in `ℱ_N` (image of the grid point under its coset).
    pub x: f64,
    pub y: f64,
    pub grid_spacing: f64,
}

pub fn sup_norm_numeric(f: &FormData) -> Result<SupNorm> {
    if f.is_zero() {
        return Ok(SupNorm { value: 0.0, x: 0.0, y: 0.0, grid_spacing: 0.0 });
    }
    let reps = coset_representatives(f.level);
    // a cusp of width w makes the density peak near y ≈ κw/(4π) in ℱ_1
    let y_max = (f.weight as f64 * f.level as f64 / (2.0 * std::f64::consts::PI)).max(1.0) + 3.0;
    let (nx, ny) = (48usize, 160usize);
    let h = 1.0 / nx as f64;
    let mut best = (0.0f64, 0.0, 1.0, 0usize);
    for (k, g) in reps.iter().enumerate() {
        for i in 0..=nx {
            let x = -0.5 + i as f64 * h;
            let y0 = (1.0 - x * x).sqrt();
            for j in 0..=ny {
                let y = y0 + (y_max - y0) * j as f64 / ny as f64;
                let (gx, gy) = act(g, x, y);
                let v = f.density(gx, gy)?;
                if v > best.0 {
                    best = (v, x, y, k);
                }
            }
        }
    }
    let (mut v, mut x, mut y, k) = best;
    let g = reps[k];
    let mut step = h;
    while step > 1e-12 {
        let mut moved = false;
        for (dx, dy) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
            let (cx, cy) = (x + dx, y + dy);
            if cy <= 0.0 {
                continue;
            }
            let (gx, gy) = act(&g, cx, cy);
            let c = f.density(gx, gy)?;
            if c > v {
                (v, x, y, moved) = (c, cx, cy, true);
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    let (gx, gy) = act(&g, x, y);
    Ok(SupNorm { value: v.sqrt(), x: gx, y: gy, grid_spacing: h })
}

/// Norm and sup norm together, so several audits can share them.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measured {
    pub norm: NormValue,
    pub sup: SupNorm,
}

pub fn measure(f: &FormData, rel_tol: f64) -> Result<Measured> {
    Ok(Measured { norm: petersson_numeric(f, rel_tol)?, sup: sup_norm_numeric(f)? })
}

/// One row of the norm-inequality audit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub schema: u32,
    pub form: String,
    #[serde(rename = "N")]
    pub level: u64,
    #[serde(rename = "κ")]
    pub weight: u32,
    #[serde(rename = "Y")]
    pub y: f64,
    pub norm: f64,
    pub norm_error: f64,
    pub supnorm: f64,
    #[serde(rename = "I_f")]
    pub i_f: f64,
    pub volume_bound: f64,
    /// `Vol(ℱ_N ∩ {y < Y})` of the Ford domain by quadrature.
    pub volume: f64,
    /// `I_f(Y)/index + volume_bound·‖f‖_∞²/index`.
    pub rhs: f64,
    pub inequality_ok: bool,
    /// The same inequality with the measured volume in place of the bound.
    pub inequality_ok_measured_volume: bool,
    /// `‖f‖²·index / S_f(X)` at `X = N^{2.1}`.
    pub effective_c1: f64,
    pub truncation: f64,
}

pub fn theorem_audit(f: &FormData, y: f64, m: &Measured) -> Result<AuditReport> {
    let index = index_gamma0(f.level) as f64;
    let strip = i_f(y, f)?;
    let vol = cusp_tail_volume(f.level, y, 0, VOLUME_SEED)?;
    let i_total = strip.value + strip.tail_bound;
    let sup2 = m.sup.value * m.sup.value;
    let rhs = i_total / index + vol.bound * sup2 / index;
    let rhs_measured = i_total / index + vol.quadrature * sup2 / index;
    let truncation = (f.level as f64).powf(2.1).max(1.0);
    let s = rational_to_f64(&s_f(truncation, f)?);
    let effective_c1 = if s > 0.0 { m.norm.value * index / s } else { 0.0 };
    let lhs = m.norm.value - m.norm.error;
    Ok(AuditReport {
        schema: 1,
        form: f.name.clone(),
        level: f.level,
        weight: f.weight,
        y,
        norm: m.norm.value,
        norm_error: m.norm.error,
        supnorm: m.sup.value,
        i_f: strip.value,
        volume_bound: vol.bound,
        volume: vol.quadrature,
        rhs,
        inequality_ok: lhs <= rhs,
        inequality_ok_measured_volume: lhs <= rhs_measured,
        effective_c1,
        truncation,
    })
}

/// `max_n |a(n)| / (n^{(κ−1)/2}·‖f‖)` and whether every term respects the
/// Deligne bound `|a(n)| <= d(n)·n^{(κ−1)/2}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientShape {
    pub max_ratio: f64,
    pub argmax: usize,
    pub deligne_ok: bool,
}

pub fn coefficient_shape(f: &FormData, norm_squared: f64) -> CoefficientShape {
    let norm = norm_squared.sqrt();
    let mut out = CoefficientShape { max_ratio: 0.0, argmax: 0, deligne_ok: true };
    for (i, a) in f.coeffs.iter().enumerate() {
        let n = i + 1;
        let scaled = a.to_f64().unwrap_or(f64::INFINITY).abs() / (n as f64).powf((f.weight as f64 - 1.0) / 2.0);
        if scaled > divisors(n as u64).len() as f64 * (1.0 + 1e-12) {
            out.deligne_ok = false;
        }
        let r = scaled / norm;
        if r > out.max_ratio {
            out.max_ratio = r;
            out.argmax = n;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::petersson::forms::corpus;

    #[test]
    fn cosets() {
        for n in [1u64, 2, 4, 6, 11, 12] {
            let reps = coset_representatives(n);
            assert_eq!(reps.len() as u64, index_gamma0(n));
            for [a, b, c, d] in reps {
                assert_eq!(a * d - b * c, 1);
            }
        }
    }

    #[test]
    fn delta_norm() {
        let delta = &corpus(50)[0];
        let v = petersson_numeric(delta, 1e-7).unwrap();
        assert!((v.value - 1.035_362e-6).abs() < 1e-11, "{v:?}");
        let twice = petersson_numeric(&delta.scaled(2), 1e-7).unwrap();
        assert!((twice.value / v.value - 4.0).abs() < 1e-9);
        let zero = FormData::zero(1, 12, 10);
        assert_eq!(petersson_numeric(&zero, 1e-6).unwrap().value, 0.0);
        assert_eq!(sup_norm_numeric(&zero).unwrap().value, 0.0);
    }

    #[test]
    fn delta_sup_norm() {
        let delta = &corpus(50)[0];
        let s = sup_norm_numeric(delta).unwrap();
        // the maximum sits at the corner ρ = e^{2πi/3} (up to translation)
        let corner = (3f64.sqrt() / 2.0, s.x - s.x.round());
        assert!((s.y - corner.0).abs() < 1e-6 && (corner.1.abs() - 0.5).abs() < 1e-6, "{s:?}");
        let (re, im) = delta.eval_q(-0.5, corner.0).unwrap();
        let at_rho = (re * re + im * im).sqrt() * corner.0.powi(6);
        assert!((s.value - at_rho).abs() < 1e-12 * at_rho);
        // it beats the imaginary axis, whose best point is y = 1
        let (re, im) = delta.eval_q(0.0, 1.0).unwrap();
        assert!(s.value > (re * re + im * im).sqrt());
        let s2 = sup_norm_numeric(&delta.scaled(2)).unwrap();
        assert!((s2.value / s.value - 2.0).abs() < 1e-9);
    }
}
