//! Cusps, index and volume of `Γ0(N)`, and its Ford fundamental domain.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{dedekind_psi, divisors, euler_phi, gcd, prime_divisors};
use crate::numkernel::quadrature::{compensated_sum, integrate_with_limit};
use crate::{Error, Result};

/// The cusp `u/v` of `Γ0(N)` with its width.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CuspClass {
    pub u: i64,
    pub v: u64,
    pub width: u64,
}

/// Cusp representatives `u/v`: `v | N` and `u` running over units modulo
/// `gcd(v, N/v)`, lifted so that `gcd(u, v) = 1`. Width `N/gcd(N, v²)`.
pub fn cusps(n: u64) -> Vec<CuspClass> {
    let mut out = Vec::new();
    for v in divisors(n) {
        let g = gcd(v as i64, (n / v) as i64) as u64;
        let width = n / gcd(n as i64, (v * v) as i64) as u64;
        for r in 0..g {
            if gcd(r as i64, g as i64) != 1 {
                continue;
            }
            let mut u = r as i64;
            while gcd(u, v as i64) != 1 {
                u += g as i64;
            }
            out.push(CuspClass { u, v, width });
        }
    }
    out
}

/// `Σ_{v|N} φ(gcd(v, N/v))`.
pub fn cusp_count(n: u64) -> u64 {
    divisors(n).into_iter().map(|v| euler_phi(gcd(v as i64, (n / v) as i64) as u64)).sum()
}

/// `[SL_2(ℤ) : Γ0(N)] = N·∏_{p|N}(1 + 1/p)`.
pub fn index_gamma0(n: u64) -> u64 {
    dedekind_psi(n)
}

/// `Σ_{v|N} (N v²/gcd(v², N))·φ(gcd(v, N/v))`.
pub fn psi_vol_divisor_sum(n: u64) -> u64 {
    divisors(n)
        .into_iter()
        .map(|v| n * v * v / gcd((v * v) as i64, n as i64) as u64 * euler_phi(gcd(v as i64, (n / v) as i64) as u64))
        .sum()
}

/// `N²·∏_{p|N}(1 + 1/p)`.
pub fn psi_vol_product(n: u64) -> u64 {
    let mut r = n * n;
    for p in prime_divisors(n) {
        r = r / p * (p + 1);
    }
    r
}

/// Both volume formulas; they must agree.
pub fn psi_vol(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::Domain("N must be positive".into()));
    }
    let (a, b) = (psi_vol_divisor_sum(n), psi_vol_product(n));
    if a != b {
        return Err(Error::Mismatch(format!("psi_vol({n}): divisor sum {a} != product {b}")));
    }
    Ok(a)
}

struct UnionFind(Vec<u32>);

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] as usize != x {
            let up = self.0[self.0[x] as usize];
            self.0[x] = up;
            x = up as usize;
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb) as u32;
        }
    }
}

/// Cusp widths by brute force: the cusps are the orbits of `±T` acting on
/// the right of `Γ0(N)∖SL_2(ℤ) ≅ ℙ¹(ℤ/N)` (bottom rows `(c : d)` up to
/// units), and the orbit sizes are the widths. Returned sorted.
pub fn cusp_widths_brute_force(n: u64) -> Vec<u64> {
    let n = n as usize;
    if n == 1 {
        return vec![1];
    }
    let idx = |c: usize, d: usize| c * n + d;
    let mut uf = UnionFind((0..(n * n) as u32).collect());
    // a generating set for (ℤ/N)^×
    let mut gens = Vec::new();
    let mut reached = vec![false; n];
    reached[1] = true;
    let mut group = vec![1usize];
    for u in 2..n {
        if gcd(u as i64, n as i64) != 1 || reached[u] {
            continue;
        }
        gens.push(u);
        let mut i = 0;
        while i < group.len() {
            for &g in &gens {
                let x = group[i] * g % n;
                if !reached[x] {
                    reached[x] = true;
                    group.push(x);
                }
            }
            i += 1;
        }
    }
    let primitive = |c: usize, d: usize| gcd(gcd(c as i64, d as i64), n as i64) == 1;
    for c in 0..n {
        for d in 0..n {
            if !primitive(c, d) {
                continue;
            }
            for &g in &gens {
                uf.union(idx(c, d), idx(c * g % n, d * g % n));
            }
            uf.union(idx(c, d), idx(c, (c + d) % n));
        }
    }
    let units = euler_phi(n as u64) as usize;
    let mut sizes = std::collections::BTreeMap::<usize, usize>::new();
    for c in 0..n {
        for d in 0..n {
            if primitive(c, d) {
                let r = uf.find(idx(c, d));
                *sizes.entry(r).or_default() += 1;
            }
        }
    }
    let mut widths: Vec<u64> = sizes.values().map(|&s| (s / units) as u64).collect();
    widths.sort_unstable();
    widths
}

/// `max(b(x), floor)` where `b(x)` is the height of the floor of the Ford
/// domain of `Γ0(N)` over `x`: the largest `sqrt(1 − (cx + d)²)/c` over
/// bottom rows `(c, d)`, `N | c > 0`, `gcd(c, d) = 1`, i.e. the top of the
/// isometric circles `|cz + d| = 1`. Circles with `c > 1/floor` lie below
/// `floor` and are not searched.
pub fn ford_floor(n: u64, x: f64, floor: f64) -> f64 {
    assert!(floor > 0.0, "ford_floor needs a positive floor");
    let mut best = floor;
    let mut c = n as i64;
    while best * (c as f64) < 1.0 {
        let cf = c as f64;
        let centre = -cf * x;
        for d in [centre.floor() as i64, centre.ceil() as i64] {
            let t = cf * x + d as f64;
            if t.abs() < 1.0 && gcd(c, d) == 1 {
                best = best.max((1.0 - t * t).sqrt() / cf);
            }
        }
        c += n as i64;
    }
    best
}

/// Hyperbolic area of the Ford domain over `x` above height `Y`.
pub fn ford_column_above(n: u64, x: f64, y: f64) -> f64 {
    1.0 / ford_floor(n, x, y)
}

/// Cusp-region volume: the combinatorial bound, a quadrature value and a
/// Monte-Carlo estimate of `Vol(ℱ_N ∩ {y < Y})` for the Ford domain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailVolume {
    /// `2Y·Σ_{v|N, v≠N} (N v²/gcd(v², N))·φ(gcd(v, N/v))`.
    pub bound: f64,
    pub quadrature: f64,
    pub monte_carlo: f64,
    /// Standard error of the Monte-Carlo mean.
    pub std_error: f64,
    pub samples: usize,
}

pub const VOLUME_SEED: u64 = 0x5eed_f0d5;

// The Ford domain is 1-periodic in x and touches the real axis at cusps,
// some of which are dyadic; integrate over a shifted window.
const SHIFT: f64 = 0.123_456_7;

/// Volume of the part of the Ford domain of `Γ0(N)` below height `Y`:
/// the total area `[SL_2 : Γ0(N)]·π/3` minus `∫_0^1 dx / max(b(x), Y)`. The
/// integrand is bounded by `1/Y`, so both quadrature and sampling behave.
pub fn cusp_tail_volume(n: u64, y: f64, samples: usize, seed: u64) -> Result<TailVolume> {
    if !(y > 0.0 && y < 1.0) {
        return Err(Error::Domain(format!("cusp_tail_volume needs 0 < Y < 1, got {y}")));
    }
    let bound = 2.0 * y * (psi_vol(n)? - n * n) as f64;
    let total = index_gamma0(n) as f64 * std::f64::consts::PI / 3.0;
    let quad = integrate_with_limit(&|x: f64| ford_column_above(n, x, y), SHIFT, 1.0 + SHIFT, 1e-9, 20_000);
    if !quad.converged {
        return Err(Error::QuadratureNonConvergence(format!("Ford domain area for N = {n}, Y = {y}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vals: Vec<f64> = (0..samples).map(|_| ford_column_above(n, rng.gen::<f64>(), y)).collect();
    let mean = compensated_sum(vals.iter().copied()) / samples as f64;
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (samples.max(2) - 1) as f64;
    Ok(TailVolume {
        bound,
        quadrature: (total - quad.value).max(0.0),
        monte_carlo: (total - mean).max(0.0),
        std_error: (var / samples as f64).sqrt(),
        samples,
    })
}

/// `κ·N·log log N`, for reporting only.
pub fn dim_bound(n: u64, kappa: u32) -> Result<f64> {
    if n < 3 {
        return Err(Error::Domain(format!("dim_bound needs N >= 3, got {n}")));
    }
    Ok(kappa as f64 * n as f64 * (n as f64).ln().ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_levels() {
        assert_eq!(cusps(1), vec![CuspClass { u: 0, v: 1, width: 1 }]);
        assert_eq!(cusps(4).len(), 3);
        assert_eq!(cusps(12).len() as u64, cusp_count(12));
        assert_eq!(cusp_widths_brute_force(12).len(), cusps(12).len());
        assert_eq!((index_gamma0(1), index_gamma0(11), index_gamma0(12)), (1, 12, 24));
        assert_eq!(psi_vol(1).unwrap(), 1);
        assert_eq!(psi_vol(12).unwrap(), 288);
        assert_eq!(psi_vol(13).unwrap(), 13 * 13 + 13);
    }

    #[test]
    fn widths_agree_with_brute_force() {
        for n in 1..=60 {
            let mut w: Vec<u64> = cusps(n).iter().map(|c| c.width).collect();
            w.sort_unstable();
            assert_eq!(w, cusp_widths_brute_force(n), "N = {n}");
            assert_eq!(w.iter().sum::<u64>(), index_gamma0(n));
        }
    }

    #[test]
    fn ford_domain_has_the_right_area() {
        // the area above a tiny height approaches the full index·π/3
        for n in [1u64, 2, 4, 6, 11] {
            let y = 1e-4;
            let r = integrate_with_limit(&|x: f64| ford_column_above(n, x, y), SHIFT, 1.0 + SHIFT, 1e-9, 20_000);
            let expect = index_gamma0(n) as f64 * std::f64::consts::PI / 3.0;
            let missing = expect - r.value;
            assert!(missing > -1e-7 && missing < 2.0 * y * (psi_vol(n).unwrap() - n * n) as f64 + 1e-7, "N = {n}: {missing}");
        }
    }

    #[test]
    fn tail_volume() {
        let v = cusp_tail_volume(1, 0.5, 1000, VOLUME_SEED).unwrap();
        assert_eq!(v.bound, 0.0);
        assert!(v.quadrature < 1e-8 && v.monte_carlo < 5.0 * v.std_error);
        let v = cusp_tail_volume(4, 0.01, 20_000, VOLUME_SEED).unwrap();
        assert!((v.bound - 2.0 * 0.01 * (24.0 - 16.0)).abs() < 1e-12);
        assert!(v.bound >= v.monte_carlo && v.bound >= v.quadrature);
        assert!((v.monte_carlo - v.quadrature).abs() < 5.0 * v.std_error + 1e-9, "{v:?}");
        assert!(dim_bound(2, 2).is_err());
        assert!((dim_bound(3, 2).unwrap() - 6.0 * 3f64.ln().ln()).abs() < 1e-15);
    }
}
