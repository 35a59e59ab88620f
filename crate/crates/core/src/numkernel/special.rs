use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::bigfloat::BigFloatWithError;
use super::elementary::{exp, ln, pi};
use crate::{Error, Result};

/// Kronecker symbol `(a|n)` with the usual extensions to `n = 2`, `n <= 0`.
pub fn kronecker(a: i64, n: i64) -> i32 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut result = 1i32;
    let mut n = n as i128;
    let a = a as i128;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    let twos = n.trailing_zeros();
    if twos > 0 {
        if a % 2 == 0 {
            return 0;
        }
        let r = a.rem_euclid(8);
        if twos % 2 == 1 && (r == 3 || r == 5) {
            result = -result;
        }
        n >>= twos;
    }
    // Jacobi symbol (a|n) for odd positive n
    let mut a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Scalars on which the Legendre recurrence can run.
pub trait LegendreScalar: Clone {
    fn constant(n: i64, like: &Self) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div_i64(&self, d: i64) -> Self;
}

impl LegendreScalar for f64 {
    fn constant(n: i64, _: &Self) -> Self {
        n as f64
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div_i64(&self, d: i64) -> Self {
        self / d as f64
    }
}

impl LegendreScalar for BigRational {
    fn constant(n: i64, _: &Self) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div_i64(&self, d: i64) -> Self {
        self / BigRational::from_integer(BigInt::from(d))
    }
}

impl LegendreScalar for BigFloatWithError {
    fn constant(n: i64, like: &Self) -> Self {
        BigFloatWithError::from_i64(n, like.precision_bits)
    }
    fn add(&self, o: &Self) -> Self {
        BigFloatWithError::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        BigFloatWithError::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        BigFloatWithError::mul(self, o)
    }
    fn div_i64(&self, d: i64) -> Self {
        BigFloatWithError::div_i64(self, d)
    }
}

/// `P_0(x), …, P_n(x)` by the three-term recurrence.
pub fn legendre_p_all<T: LegendreScalar>(n: usize, x: &T) -> Vec<T> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(T::constant(1, x));
    if n == 0 {
        return out;
    }
    out.push(x.clone());
    for k in 1..n {
        // (k+1) P_{k+1} = (2k+1) x P_k - k P_{k-1}
        let a = x.mul(&out[k]).mul(&T::constant(2 * k as i64 + 1, x));
        let b = out[k - 1].mul(&T::constant(k as i64, x));
        out.push(a.sub(&b).div_i64(k as i64 + 1));
    }
    out
}

/// Legendre polynomial `P_n(x)`; exact on rational input.
pub fn legendre_p<T: LegendreScalar>(n: usize, x: &T) -> T {
    legendre_p_all(n, x).pop().unwrap()
}

/// `P_n` for even `n` as a polynomial in `x²`, evaluated exactly at a
/// rational value of `x²`. This is how `P_{k-1}(a / (m√D))` stays rational.
pub fn legendre_p_even_at_square(n: usize, x_squared: &BigRational) -> BigRational {
    assert!(n % 2 == 0, "only even Legendre polynomials are functions of x²");
    // coefficients of P_n in powers of x, from the recurrence on polynomials
    let coeffs = legendre_coefficients(n);
    let mut acc = BigRational::zero();
    for j in (0..=n / 2).rev() {
        acc = acc * x_squared + &coeffs[2 * j];
    }
    acc
}

/// Exact rational coefficients of `P_n` (index = power of x).
pub fn legendre_coefficients(n: usize) -> Vec<BigRational> {
    let zero = || BigRational::zero();
    let mut prev: Vec<BigRational> = vec![BigRational::one()];
    if n == 0 {
        return prev;
    }
    let mut cur: Vec<BigRational> = vec![zero(), BigRational::one()];
    for k in 1..n {
        let mut next = vec![zero(); k + 2];
        for (i, c) in cur.iter().enumerate() {
            next[i + 1] += c * BigRational::from_integer(BigInt::from(2 * k + 1));
        }
        for (i, c) in prev.iter().enumerate() {
            next[i] -= c * BigRational::from_integer(BigInt::from(k));
        }
        let d = BigRational::from_integer(BigInt::from(k + 1));
        for c in next.iter_mut() {
            *c = &*c / &d;
        }
        prev = cur;
        cur = next;
    }
    cur
}

/// Legendre function of the second kind `Q_n(t)`, `t > 1`, from the closed
/// form `Q_n = P_n·Q_0 − W_{n−1}` with `Q_0(t) = ½ ln((t+1)/(t−1))`.
///
/// The closed form cancels badly for large `t`; the working precision is
/// raised internally by roughly `2(n+1)·log2 t` bits so that the returned
/// ball still has about `t.precision_bits` correct bits.
pub fn legendre_q(n: usize, t: &BigFloatWithError) -> Result<BigFloatWithError> {
    let one = BigFloatWithError::from_i64(1, t.precision_bits);
    let above = t.sub(&one);
    if !above.is_positive() {
        return Err(Error::Domain(format!("Legendre Q needs t > 1, got {}", t.to_f64())));
    }
    let log2t = t.to_f64().log2().max(0.0);
    let gap_bits = (-above.to_f64().log2()).max(0.0);
    let guard = 16 + ((2 * n + 2) as f64 * log2t).ceil() as u32 + gap_bits.ceil() as u32;
    let work = t.clone().with_precision(t.precision_bits + guard);
    let one = BigFloatWithError::from_i64(1, work.precision_bits);
    let ratio = work.add(&one).div(&work.sub(&one)).ok_or_else(|| Error::Domain("t too close to 1".into()))?;
    let q0 = ln(&ratio).ok_or_else(|| Error::Domain("log of non-positive ratio".into()))?.shl(-1);
    let ps = legendre_p_all(n, &work);
    let mut w = BigFloatWithError::from_i64(0, work.precision_bits);
    for k in 1..=n {
        w = w.add(&ps[k - 1].mul(&ps[n - k]).div_i64(k as i64));
    }
    let q = ps[n].mul(&q0).sub(&w);
    let (value, e) = q.value.round(t.precision_bits);
    Ok(BigFloatWithError { value, error_bound: q.error_bound.add(e), precision_bits: t.precision_bits })
}

/// `Q_n(t)` in double precision.
///
/// For `t >= 3` this sums the convergent expansion in `1/t²`
/// (`Q_n(t) = c_n t^{-n-1} ₂F₁((n+1)/2, (n+2)/2; n+3/2; t^{-2})` with
/// `c_n = n!(n+1)! 2^{n+1}/(2n+2)!`), which avoids the catastrophic
/// cancellation of the closed form; below that it rounds the 160-bit
/// closed-form ball.
pub fn legendre_q_f64(n: usize, t: f64) -> Result<f64> {
    if !(t > 1.0) {
        return Err(Error::Domain(format!("Legendre Q needs t > 1, got {t}")));
    }
    if t < 3.0 {
        let b = BigFloatWithError::from_f64(t, 160);
        return Ok(legendre_q(n, &b)?.to_f64());
    }
    let mut c = 2f64.powi(n as i32 + 1);
    for j in 1..=n {
        c *= j as f64;
    }
    for j in 1..=(n + 1) {
        c *= j as f64;
    }
    for j in 1..=(2 * n + 2) {
        c /= j as f64;
    }
    let z = 1.0 / (t * t);
    let (a, b, cc) = ((n as f64 + 1.0) / 2.0, (n as f64 + 2.0) / 2.0, n as f64 + 1.5);
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 0..200 {
        let j = j as f64;
        term *= (a + j) * (b + j) / ((cc + j) * (j + 1.0)) * z;
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    Ok(c * sum * t.powi(-(n as i32) - 1))
}

/// `∫_Y^∞ e^{−4πny} y^{κ−2} dy` in closed form
/// (`Γ(κ−1, 4πnY)/(4πn)^{κ−1}` with the finite sum for the upper incomplete
/// gamma function at integer order), as a ball at `prec` bits.
pub fn tail_integral(n: u64, y: f64, kappa: u32, prec: u32) -> Result<BigFloatWithError> {
    if !(y >= 0.0) || kappa < 2 || n == 0 {
        return Err(Error::Domain(format!("tail_integral needs n >= 1, Y >= 0, κ >= 2 (got n={n}, Y={y}, κ={kappa})")));
    }
    let s = (kappa - 1) as i64;
    let four_pi_n = pi(prec).mul_i64(4 * n as i64);
    let x = four_pi_n.mul(&BigFloatWithError::from_f64(y, prec));
    // (s-1)! e^{-x} Σ_{j<s} x^j / j!
    let mut term = BigFloatWithError::from_i64(1, prec);
    let mut sum = term.clone();
    for j in 1..s {
        term = term.mul(&x).div_i64(j);
        sum = sum.add(&term);
    }
    let mut fact = BigFloatWithError::from_i64(1, prec);
    for j in 2..s {
        fact = fact.mul_i64(j);
    }
    let gamma = fact.mul(&exp(&x.neg())).mul(&sum);
    let mut denom = BigFloatWithError::from_i64(1, prec);
    for _ in 0..s {
        denom = denom.mul(&four_pi_n);
    }
    gamma.div(&denom).ok_or_else(|| Error::Domain("degenerate tail integral".into()))
}

/// Double-precision version of [`tail_integral`].
pub fn tail_integral_f64(n: u64, y: f64, kappa: u32) -> f64 {
    let s = (kappa - 1) as i32;
    let a = 4.0 * std::f64::consts::PI * n as f64;
    let x = a * y;
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 1..s {
        term *= x / j as f64;
        sum += term;
    }
    let mut fact = 1.0;
    for j in 2..s {
        fact *= j as f64;
    }
    fact * (-x).exp() * sum / a.powi(s)
}

/// Convert an exact rational to `f64`.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}
