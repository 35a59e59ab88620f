//! The q-expansion of `j` and certified evaluation at CM points.

use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::numkernel::elementary::{cis, exp, pi, sqrt_int};
use crate::numkernel::{ComplexWithError, Mag};
use crate::qseries::{eisenstein_e4, euler_product, series_div, series_mul, series_power};
use crate::{Error, Result};

/// Integer q-expansion of `j`: `coefficients[0]` is the `q^{−1}` coefficient,
/// `coefficients[n + 1]` the `q^n` one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QExpansion {
    pub coefficients: Vec<BigInt>,
}

impl QExpansion {
    /// Coefficient of `q^n`, `n >= −1`.
    pub fn coeff(&self, n: i64) -> &BigInt {
        &self.coefficients[(n + 1) as usize]
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }
}

fn compute_j_series(n_terms: usize) -> Vec<BigInt> {
    // q·j = E4³ / ∏(1 − q^n)^24
    let e4 = eisenstein_e4(n_terms);
    let e4_cubed = series_mul(&series_mul(&e4, &e4, n_terms), &e4, n_terms);
    let delta_over_q = series_power(&euler_product(n_terms), 24, n_terms);
    let out = series_div(&e4_cubed, &delta_over_q, n_terms);
    if n_terms > 2 {
        assert_eq!(out[2], BigInt::from(196884u32), "j-series self-check failed");
    }
    out
}

fn cache() -> &'static RwLock<Vec<BigInt>> {
    static CACHE: OnceLock<RwLock<Vec<BigInt>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(Vec::new()))
}

/// First `n_terms` coefficients of `j` (starting at `q^{−1}`), cached and
/// extended on demand.
pub fn j_series(n_terms: usize) -> Result<QExpansion> {
    if n_terms < 2 {
        return Err(Error::Domain("j_series needs at least two terms".into()));
    }
    {
        let c = cache().read().unwrap();
        if c.len() >= n_terms {
            return Ok(QExpansion { coefficients: c[..n_terms].to_vec() });
        }
    }
    let mut c = cache().write().unwrap();
    if c.len() < n_terms {
        *c = compute_j_series(n_terms.max(2 * c.len()));
    }
    Ok(QExpansion { coefficients: c[..n_terms].to_vec() })
}

/// Run `f` on the cached coefficients (avoids copying long vectors).
fn with_j_coefficients<T>(n_terms: usize, f: impl FnOnce(&[BigInt]) -> T) -> T {
    j_series(n_terms).expect("n_terms >= 2");
    let c = cache().read().unwrap();
    f(&c[..n_terms])
}

/// Natural log of the known upper bound `c_n <= e^{4π√n} / (√2·n^{3/4})`.
fn ln_coeff_bound(n: f64) -> f64 {
    4.0 * std::f64::consts::PI * n.sqrt() - 0.5 * std::f64::consts::LN_2 - 0.75 * n.ln()
}

/// A positive definite binary quadratic form `A x² + B xy + C y²` standing for
/// its root `τ = (−B + √(B² − 4AC))/(2A)` in the upper half plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadForm {
    pub fn new(a: i64, b: i64, c: i64) -> Result<Self> {
        let f = Self { a, b, c };
        if a <= 0 || f.disc() >= 0 {
            return Err(Error::Domain(format!("{f:?} is not positive definite")));
        }
        Ok(f)
    }

    pub fn disc(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    /// The CM point of the maximal order of discriminant `d`, `(−B + √d)/2`
    /// with `B = d mod 2`.
    pub fn principal(d: i64) -> Self {
        let b = d.rem_euclid(2);
        Self { a: 1, b, c: (b * b - d) / 4 }
    }

    /// Divide out the content.
    pub fn primitive(&self) -> Self {
        let g = crate::arith::gcd(crate::arith::gcd(self.a, self.b), self.c).abs();
        Self { a: self.a / g, b: self.b / g, c: self.c / g }
    }

    /// The SL₂(ℤ)-equivalent reduced form: `|B| <= A <= C`, `B >= 0` when
    /// `|B| = A` or `A = C`. Its root lies in the standard fundamental domain.
    pub fn reduce(&self) -> Self {
        let (mut a, mut b, mut c) = (self.a as i128, self.b as i128, self.c as i128);
        loop {
            // translate: B into (−A, A]
            if b > a || b <= -a {
                let k = (a - b).div_euclid(2 * a);
                // x ↦ x + k y
                let nb = b + 2 * k * a;
                c += k * b + k * k * a;
                b = nb;
            }
            if a > c {
                std::mem::swap(&mut a, &mut c);
                b = -b;
                continue;
            }
            if a == c && b < 0 {
                b = -b;
            }
            break;
        }
        Self { a: a as i64, b: b as i64, c: c as i64 }
    }

    /// Approximate `(Re τ, Im τ)`.
    pub fn root_f64(&self) -> (f64, f64) {
        let a = self.a as f64;
        (-(self.b as f64) / (2.0 * a), ((-self.disc()) as f64).sqrt() / (2.0 * a))
    }
}

/// Number of series terms `N` (`c_1…c_N`) and a bound on the tail
/// `Σ_{n>N} c_n |q|^n`, as `log2` of the bound.
fn truncation(ln_abs_q: f64, prec_bits: u32) -> (usize, f64) {
    let target = -((prec_bits + 8) as f64) * std::f64::consts::LN_2;
    let mut n = 4usize;
    loop {
        let next = (n + 1) as f64;
        let ln_term = ln_coeff_bound(next) + next * ln_abs_q;
        // successive bound terms shrink by at least e^{2π/√(n+1)}|q|
        let ratio = (2.0 * std::f64::consts::PI / next.sqrt() + ln_abs_q).exp();
        if ln_term < target && ratio < 0.5 {
            return (n, (ln_term + std::f64::consts::LN_2) / std::f64::consts::LN_2);
        }
        n += 1;
    }
}

/// `j(τ)` at the root of a positive definite form, with a certified error
/// bound, working at `prec_bits` bits. The form is reduced first, so
/// `|q| <= e^{−π√3}`.
pub fn eval_j(form: &QuadForm, prec_bits: u32) -> Result<ComplexWithError> {
    let f = form.reduce();
    let disc = -(f.disc() as i128);
    let (_, y) = f.root_f64();
    let ln_abs_q = -2.0 * std::f64::consts::PI * y * (1.0 - 1e-12);
    if !(ln_abs_q < -5.0) {
        return Err(Error::PrecisionInsufficient(format!("|q| too large for {f:?}")));
    }
    // enough bits that the 1/q term, of size e^{2πy}, keeps prec_bits after the point
    let extra = (2.0 * std::f64::consts::PI * y / std::f64::consts::LN_2).ceil() as u32;
    let w = prec_bits + extra + 16;
    let (n_terms, log2_tail) = truncation(ln_abs_q, w);
    if n_terms > 200_000 {
        return Err(Error::PrecisionInsufficient(format!("{n_terms} series terms needed")));
    }

    let pi_w = pi(w);
    // y_ball = π√|Δ| / A, θ = πB/A
    let y_ball = pi_w.mul(&sqrt_int(&BigInt::from(disc), w)).div_i64(f.a);
    let theta = pi_w.mul_i64(f.b).div_i64(f.a);
    let q = cis(&theta.neg()).mul_real(&exp(&y_ball.neg()));
    let q_inv = cis(&theta).mul_real(&exp(&y_ball));

    let mut acc = with_j_coefficients(n_terms + 2, |c| {
        // Horner on c_1 + c_2 q + … + c_N q^{N−1}
        let mut acc = ComplexWithError::from_bigint(&c[n_terms + 1], w);
        for n in (1..n_terms).rev() {
            acc = acc.mul(&q).add(&ComplexWithError::from_bigint(&c[n + 1], w));
        }
        acc
    });
    acc = acc.mul(&q);
    let mut j = q_inv.add(&ComplexWithError::from_bigint(&BigInt::from(744), w)).add(&acc);
    j.error_bound = j.error_bound.add(Mag::pow2(log2_tail.ceil() as i64));
    Ok(j)
}

/// `j` at an arbitrary point of the upper half plane, in double precision
/// (for plotting). The point is first moved into the fundamental domain.
pub fn eval_j_f64(x: f64, y: f64) -> Result<(f64, f64)> {
    if !(y > 0.0) {
        return Err(Error::Domain("j needs Im z > 0".into()));
    }
    let (mut x, mut y) = (x, y);
    for _ in 0..1000 {
        x -= x.round();
        let r2 = x * x + y * y;
        if r2 >= 1.0 - 1e-15 {
            break;
        }
        x = -x / r2;
        y /= r2;
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let aq = (-two_pi * y).exp();
    let (s, c) = (two_pi * x).sin_cos();
    let q = (aq * c, aq * s);
    let (n_terms, _) = truncation(-two_pi * y, 53);
    let (re, im) = with_j_coefficients(n_terms + 2, |coeffs| {
        let to_f = |b: &BigInt| -> f64 { b.to_string().parse::<f64>().unwrap_or(f64::INFINITY) };
        let mut acc = (to_f(&coeffs[n_terms + 1]), 0.0);
        for n in (1..n_terms).rev() {
            acc = (acc.0 * q.0 - acc.1 * q.1 + to_f(&coeffs[n + 1]), acc.0 * q.1 + acc.1 * q.0);
        }
        (acc.0 * q.0 - acc.1 * q.1, acc.0 * q.1 + acc.1 * q.0)
    });
    let inv = (c / aq, -s / aq);
    Ok((inv.0 + 744.0 + re, inv.1 + im))
}

/// Certified rounding of a ball known to contain an integer.
pub fn round_certified(z: &ComplexWithError) -> Option<(BigInt, f64)> {
    let radius = z.error_bound.to_f64();
    let (n, frac) = z.re.round_to_integer();
    let residual = frac.abs().to_f64();
    let im = z.im.abs().to_f64();
    let limit = 2f64.powi(-10);
    (radius < limit && residual < limit && im <= radius + limit).then_some((n, residual))
}

/// Convenience: `j` at the principal CM point of discriminant `d`, rounded.
pub fn j_of_discriminant(d: i64, prec_bits: u32) -> Result<BigInt> {
    let z = eval_j(&QuadForm::principal(d), prec_bits)?;
    round_certified(&z)
        .map(|(n, _)| n)
        .ok_or_else(|| Error::PrecisionInsufficient(format!("j({d}) not certified at {prec_bits} bits")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn series_coefficients() {
        let j = j_series(5).unwrap();
        assert_eq!(*j.coeff(-1), BigInt::from(1));
        assert_eq!(*j.coeff(0), BigInt::from(744));
        assert_eq!(*j.coeff(1), BigInt::from(196884));
        assert_eq!(*j.coeff(2), BigInt::from(21493760));
        assert_eq!(*j.coeff(3), BigInt::from(864299970u64));
        assert!(j_series(1).is_err());
    }

    #[test]
    fn coefficient_bound_holds_on_computed_range() {
        let j = j_series(400).unwrap();
        for n in 1..398i64 {
            let c: f64 = j.coeff(n).to_string().parse().unwrap();
            assert!(c.ln() <= ln_coeff_bound(n as f64), "n = {n}");
        }
    }

    #[test]
    fn reduction() {
        assert_eq!(QuadForm::new(3, 5, 3).unwrap().reduce(), QuadForm { a: 1, b: 1, c: 3 });
        let f = QuadForm { a: 25, b: 30, c: 10 }.primitive();
        assert_eq!(f, QuadForm { a: 5, b: 6, c: 2 });
        let r = f.reduce();
        assert_eq!(r.disc(), f.disc());
        assert!(r.b.abs() <= r.a && r.a <= r.c);
    }

    #[test]
    fn cm_values() {
        for (d, j) in crate::quadfield::CLASS_NUMBER_ONE {
            assert_eq!(j_of_discriminant(d, 128).unwrap(), BigInt::from(j), "D = {d}");
        }
        // j(ζ₃) = 0 within the error bound
        let z = eval_j(&QuadForm::principal(-3), 128).unwrap();
        assert!(z.re.abs().to_f64() <= z.error_bound.to_f64() + 1e-30);
        let (n, _) = round_certified(&z).unwrap();
        assert!(n.is_zero());
    }

    #[test]
    fn f64_path() {
        let (re, im) = eval_j_f64(0.0, 1.0).unwrap();
        assert!((re - 1728.0).abs() < 1e-8 && im.abs() < 1e-8);
        // invariance under z ↦ −1/z
        let (a, b) = eval_j_f64(0.3, 1.7).unwrap();
        let r2 = 0.09 + 1.7 * 1.7;
        let (c, d) = eval_j_f64(-0.3 / r2, 1.7 / r2).unwrap();
        assert!(((a - c) / a).abs() < 1e-9 && ((b - d) / b.abs().max(1.0)).abs() < 1e-9);
    }
}
