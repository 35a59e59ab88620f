//! Elementary constants and functions on error-carrying big floats.
//!
//! Everything here works in binary fixed point internally (an integer `X`
//! standing for `X / 2^F`) and hands back a [`BigFloatWithError`] whose
//! radius covers both series truncation and every integer floor taken on
//! the way.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::bigfloat::{BigFloat, BigFloatWithError, ComplexWithError};
use super::mag::Mag;

/// `x / 2^f` truncated toward zero, so that series terms of either sign
/// shrink to exactly zero.
fn shr_trunc(x: &BigInt, f: u32) -> BigInt {
    if x.is_negative() {
        -((-x) >> f as usize)
    } else {
        x >> f as usize
    }
}

fn fixed_to_ball(x: BigInt, frac_bits: u32, err_units: u64, prec: u32) -> BigFloatWithError {
    let value = BigFloat::from_parts(x, -(frac_bits as i64));
    let (value, e) = value.round(prec);
    BigFloatWithError {
        value,
        error_bound: Mag::from_f64(err_units as f64).shl(-(frac_bits as i64)).add(e),
        precision_bits: prec,
    }
}

/// `atan(1/x)` in fixed point with `frac_bits` fractional bits, plus a bound
/// on the accumulated error in units of the last place.
fn atan_inv_fixed(x: u64, frac_bits: u32) -> (BigInt, u64) {
    let x2 = BigInt::from(x) * BigInt::from(x);
    let mut power = (BigInt::one() << frac_bits as usize) / BigInt::from(x);
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    while !power.is_zero() {
        let term = &power / BigInt::from(2 * k + 1);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &x2;
        k += 1;
    }
    // each term carries at most k+2 units of floor error; plus the tail
    (sum, (k + 2) * (k + 2))
}

/// `π` to `prec` bits (Machin's formula), cached per precision.
pub fn pi(prec: u32) -> BigFloatWithError {
    static CACHE: OnceLock<Mutex<HashMap<u32, BigFloatWithError>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&prec) {
        return v.clone();
    }
    let f = prec + 48;
    let (a, ea) = atan_inv_fixed(5, f);
    let (b, eb) = atan_inv_fixed(239, f);
    let v = fixed_to_ball(a * 16 - b * 4, f, 16 * ea + 4 * eb, prec);
    cache.lock().unwrap().insert(prec, v.clone());
    v
}

/// `2·atanh(s)` for a fixed-point `s` with `|s| <= 1/3`.
fn two_atanh_fixed(s: &BigInt, frac_bits: u32) -> (BigInt, u64) {
    let s2 = shr_trunc(&(s * s), frac_bits);
    let mut power = s.clone();
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    while !power.is_zero() {
        sum += &power / BigInt::from(2 * k + 1);
        power = shr_trunc(&(&power * &s2), frac_bits);
        k += 1;
    }
    (sum * 2, 4 * (k + 2) * (k + 2))
}

/// `ln 2` to `prec` bits.
pub fn ln2(prec: u32) -> BigFloatWithError {
    let f = prec + 48;
    let third = (BigInt::one() << f as usize) / BigInt::from(3);
    let (v, e) = two_atanh_fixed(&third, f);
    // the floor in `third` perturbs the result by at most 3 units
    fixed_to_ball(v, f, e + 3, prec)
}

/// `sqrt(n)` for a positive integer, to `prec` bits.
pub fn sqrt_int(n: &BigInt, prec: u32) -> BigFloatWithError {
    assert!(n.is_positive(), "sqrt_int of a non-positive integer");
    let f = prec + 8;
    let r = (n << (2 * f as usize)).sqrt();
    fixed_to_ball(r, f, 1, prec)
}

/// `exp(x)` for a real ball.
pub fn exp(x: &BigFloatWithError) -> BigFloatWithError {
    let prec = x.precision_bits;
    if x.value.is_zero() {
        let one = BigFloatWithError::from_i64(1, prec);
        return BigFloatWithError { error_bound: x.error_bound.expm1(), ..one };
    }
    let s = (x.value.top() + 8).max(0) as u32;
    let f = prec + s + 48;
    // t = x / 2^s in fixed point (truncated: at most one unit off)
    let t = {
        let v = x.value.shl(-(s as i64));
        let shift = v.exponent() + f as i64;
        if shift >= 0 {
            v.mantissa() << shift as usize
        } else {
            v.mantissa() >> (-shift) as usize
        }
    };
    let one = BigInt::one() << f as usize;
    let mut term = one.clone();
    let mut sum = one;
    let mut k: u64 = 1;
    while !term.is_zero() {
        term = shr_trunc(&(&term * &t), f) / BigInt::from(k);
        sum += &term;
        k += 1;
    }
    let mut r = fixed_to_ball(sum, f, 2 * k + 8, f);
    for _ in 0..s {
        r = r.mul(&r);
    }
    let (value, e) = r.value.round(prec);
    let from_input = value.mag().mul(x.error_bound.expm1());
    BigFloatWithError { value, error_bound: r.error_bound.add(e).add(from_input), precision_bits: prec }
}

/// `exp(iθ)` for a real ball `θ`.
pub fn cis(theta: &BigFloatWithError) -> ComplexWithError {
    let prec = theta.precision_bits;
    if theta.value.is_zero() {
        let mut one = ComplexWithError::one(prec);
        one.error_bound = theta.error_bound;
        return one;
    }
    let s = (theta.value.top() + 8).max(0) as u32;
    let f = prec + s + 48;
    let t = {
        let v = theta.value.shl(-(s as i64));
        let shift = v.exponent() + f as i64;
        if shift >= 0 {
            v.mantissa() << shift as usize
        } else {
            v.mantissa() >> (-shift) as usize
        }
    };
    let mut term = BigInt::one() << f as usize;
    let mut c = term.clone();
    let mut sn = BigInt::zero();
    let mut k: u64 = 1;
    while !term.is_zero() {
        term = shr_trunc(&(&term * &t), f) / BigInt::from(k);
        match k % 4 {
            1 => sn += &term,
            2 => c -= &term,
            3 => sn -= &term,
            _ => c += &term,
        }
        k += 1;
    }
    let cr = fixed_to_ball(c, f, 2 * k + 8, f);
    let sr = fixed_to_ball(sn, f, 2 * k + 8, f);
    let mut z = ComplexWithError::from_parts(&cr, &sr);
    for _ in 0..s {
        z = z.square();
    }
    let (re, e1) = z.re.round(prec);
    let (im, e2) = z.im.round(prec);
    ComplexWithError { re, im, error_bound: z.error_bound.add(e1).add(e2).add(theta.error_bound), precision_bits: prec }
}

/// Natural logarithm of a ball that lies strictly inside `(0, ∞)`.
pub fn ln(x: &BigFloatWithError) -> Option<BigFloatWithError> {
    if !x.is_positive() {
        return None;
    }
    let prec = x.precision_bits;
    let f = prec + 64;
    // x = frac · 2^k, frac in [1/√2, √2)
    let mut k = x.value.top();
    let mut frac = x.value.shl(-k);
    if frac.to_f64() < std::f64::consts::FRAC_1_SQRT_2 {
        frac = frac.shl(1);
        k -= 1;
    }
    let fixed = |v: &BigFloat| -> BigInt {
        let shift = v.exponent() + f as i64;
        if shift >= 0 {
            v.mantissa() << shift as usize
        } else {
            v.mantissa() >> (-shift) as usize
        }
    };
    let one = BigInt::one() << f as usize;
    let fr = fixed(&frac);
    let s = ((&fr - &one) << f as usize) / (&fr + &one);
    let (lf, e1) = two_atanh_fixed(&s, f);
    let l2 = ln2(f);
    let mut r = fixed_to_ball(lf, f, e1 + 4, f).add(&l2.mul_i64(k));
    // ln(c ± ρ) moves by at most ρ / (c - ρ)
    let lower = x.value.mag_lower();
    let gap = if x.error_bound.shl(1) <= lower { lower.shl(-1) } else { lower.shl(-8) };
    r.error_bound = r.error_bound.add(x.error_bound.div_lower(gap));
    let (value, e) = r.value.round(prec);
    Some(BigFloatWithError { value, error_bound: r.error_bound.add(e), precision_bits: prec })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(x: &BigFloatWithError, y: f64, tol: f64) {
        assert!((x.to_f64() - y).abs() <= tol * y.abs().max(1.0), "{} vs {}", x.to_f64(), y);
        assert!(x.error_bound.to_f64() < 1e-30, "radius too large: {:?}", x.error_bound);
    }

    #[test]
    fn constants() {
        close(&pi(256), std::f64::consts::PI, 1e-16);
        close(&ln2(256), std::f64::consts::LN_2, 1e-16);
        close(&sqrt_int(&BigInt::from(163), 256), 163f64.sqrt(), 1e-16);
    }

    #[test]
    fn pi_digits() {
        // first 40 digits of π
        let p = pi(200);
        let scaled = p.value.mul_exact(&BigFloat::from_bigint(BigInt::from(10u8).pow(40)));
        let (n, _) = scaled.round_to_integer();
        assert_eq!(n.to_string(), "31415926535897932384626433832795028841972");
    }

    #[test]
    fn exp_and_ln() {
        for &x in &[1.0, -3.5, 20.0, -700.0, 0.001] {
            let b = BigFloatWithError::from_f64(x, 200);
            let e = exp(&b);
            let rel = (e.to_f64() - x.exp()).abs() / x.exp();
            assert!(rel < 1e-14, "exp({x}): {rel}");
            let l = ln(&e).unwrap();
            assert!((l.to_f64() - x).abs() < 1e-13 * x.abs().max(1.0));
            assert!(l.contains_f64(x) || (l.to_f64() - x).abs() < 1e-40);
        }
    }

    #[test]
    fn cis_unit_circle() {
        let th = BigFloatWithError::from_f64(2.5, 200);
        let z = cis(&th);
        let (re, im) = z.to_f64_pair();
        assert!((re - 2.5f64.cos()).abs() < 1e-15);
        assert!((im - 2.5f64.sin()).abs() < 1e-15);
        assert!(z.error_bound.to_f64() < 1e-50);
    }

    #[test]
    fn exp_of_huge_negative_keeps_relative_accuracy() {
        let b = BigFloatWithError::from_i64(-5000, 128);
        let e = exp(&b);
        // ln(e) should give back -5000
        let l = ln(&e).unwrap();
        assert!((l.to_f64() + 5000.0).abs() < 1e-20);
    }
}
