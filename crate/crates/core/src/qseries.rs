//! Exact integer q-series: Euler products, Eisenstein series, quotients.

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Coefficients of `∏_{j>=1}(1 − q^j)` up to `q^{len−1}` (pentagonal numbers).
pub fn euler_product(len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    if len == 0 {
        return out;
    }
    out[0] = BigInt::one();
    let mut k: i64 = 1;
    loop {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        let a = (k * (3 * k - 1) / 2) as usize;
        let b = (k * (3 * k + 1) / 2) as usize;
        if a >= len {
            break;
        }
        out[a] += sign;
        if b < len {
            out[b] += sign;
        }
        k += 1;
    }
    out
}

/// `f^e` for a power series with `f[0] = 1` and integer exponent `e`, by the
/// recurrence `n·g_n = Σ_{j=1}^{n} ((e+1)j − n)·f_j·g_{n−j}` (the division
/// is exact for integer series with unit constant term).
pub fn series_power(f: &[BigInt], e: i64, len: usize) -> Vec<BigInt> {
    assert!(f.first().map(|c| c.is_one()).unwrap_or(false), "series_power needs f[0] = 1");
    let mut g = vec![BigInt::zero(); len];
    if len == 0 {
        return g;
    }
    g[0] = BigInt::one();
    let support: Vec<usize> = (1..f.len().min(len)).filter(|&j| !f[j].is_zero()).collect();
    for n in 1..len {
        let mut acc = BigInt::zero();
        for &j in support.iter().take_while(|&&j| j <= n) {
            let w = (e + 1) * j as i64 - n as i64;
            if w != 0 {
                acc += &f[j] * &g[n - j] * w;
            }
        }
        debug_assert!((&acc % n).is_zero());
        g[n] = acc / n;
    }
    g
}

/// Truncated product of two series.
pub fn series_mul(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// `a / b` for `b[0] = 1`, truncated.
pub fn series_div(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    assert!(b[0].is_one(), "series_div needs b[0] = 1");
    let mut out: Vec<BigInt> = Vec::with_capacity(len);
    for n in 0..len {
        let mut c = a.get(n).cloned().unwrap_or_default();
        for j in 1..=n.min(b.len() - 1) {
            if !b[j].is_zero() {
                c -= &b[j] * &out[n - j];
            }
        }
        out.push(c);
    }
    out
}

/// Substitute `q ↦ q^k`.
pub fn series_dilate(a: &[BigInt], k: usize, len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    for (i, c) in a.iter().enumerate() {
        if i * k >= len {
            break;
        }
        out[i * k] = c.clone();
    }
    out
}

/// `E_4 = 1 + 240 Σ σ_3(n) q^n`.
pub fn eisenstein_e4(len: usize) -> Vec<BigInt> {
    let mut sigma = vec![0u64; len];
    for d in 1..len {
        let d3 = (d as u64).pow(3);
        let mut n = d;
        while n < len {
            sigma[n] += d3;
            n += d;
        }
    }
    (0..len).map(|n| if n == 0 { BigInt::one() } else { BigInt::from(sigma[n]) * 240 }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[BigInt]) -> Vec<i64> {
        v.iter().map(|x| i64::try_from(x).unwrap()).collect()
    }

    #[test]
    fn pentagonal() {
        assert_eq!(ints(&euler_product(13)), vec![1, -1, -1, 0, 0, 1, 0, 1, 0, 0, 0, 0, -1]);
    }

    #[test]
    fn ramanujan_tau() {
        let d = series_power(&euler_product(10), 24, 10);
        // Δ = q·∏(1−q^n)^24, so d[n] = τ(n+1)
        assert_eq!(ints(&d)[..6], [1, -24, 252, -1472, 4830, -6048]);
    }

    #[test]
    fn power_and_division_agree() {
        let p = euler_product(30);
        let cube = series_power(&p, 3, 30);
        let back = series_div(&cube, &p, 30);
        assert_eq!(back, series_mul(&p, &p, 30));
        assert_eq!(series_power(&p, -1, 8).iter().map(|x| i64::try_from(x).unwrap()).collect::<Vec<_>>(), vec![1, 1, 2, 3, 5, 7, 11, 15]);
    }
}
