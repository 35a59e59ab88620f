use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::mag::Mag;

/// Binary floating point number `mant * 2^exp` with an arbitrary-precision
/// mantissa. Operations are exact unless an explicit precision is passed, in
/// which case the result is truncated and the truncation error is returned.
#[derive(Clone, PartialEq, Eq)]
pub struct BigFloat {
    mant: BigInt,
    exp: i64,
}

impl BigFloat {
    pub fn zero() -> Self {
        BigFloat { mant: BigInt::zero(), exp: 0 }
    }

    pub fn from_bigint(n: BigInt) -> Self {
        BigFloat { mant: n, exp: 0 }
    }

    pub fn from_i64(n: i64) -> Self {
        BigFloat::from_bigint(BigInt::from(n))
    }

    pub fn from_parts(mant: BigInt, exp: i64) -> Self {
        BigFloat { mant, exp }
    }

    /// Exact conversion of a finite double.
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "BigFloat::from_f64 on non-finite input");
        if x == 0.0 {
            return BigFloat::zero();
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if raw_exp == 0 { (frac, -1074) } else { (frac | (1u64 << 52), raw_exp - 1075) };
        BigFloat { mant: BigInt::from(m) * sign, exp: e }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn sign(&self) -> Sign {
        self.mant.sign()
    }

    pub fn neg(&self) -> Self {
        BigFloat { mant: -&self.mant, exp: self.exp }
    }

    pub fn abs(&self) -> Self {
        BigFloat { mant: self.mant.abs(), exp: self.exp }
    }

    /// Multiply by `2^k` (exact).
    pub fn shl(&self, k: i64) -> Self {
        BigFloat { mant: self.mant.clone(), exp: self.exp + k }
    }

    /// Number of significant bits of the mantissa.
    pub fn bits(&self) -> u64 {
        self.mant.bits()
    }

    /// Position of the leading bit: `2^(top-1) <= |x| < 2^top`.
    pub fn top(&self) -> i64 {
        self.mant.bits() as i64 + self.exp
    }

    /// Truncate to at most `prec` significant bits; returns the bound on the
    /// discarded part.
    pub fn round(self, prec: u32) -> (Self, Mag) {
        let bits = self.mant.bits();
        if bits <= prec as u64 {
            return (self, Mag::ZERO);
        }
        let shift = bits - prec as u64;
        let negative = self.mant.is_negative();
        let mag = self.mant.magnitude() >> shift;
        let mant = if negative { -BigInt::from(mag) } else { BigInt::from(mag) };
        let exp = self.exp + shift as i64;
        (BigFloat { mant, exp }, Mag::pow2(exp))
    }

    pub fn add_exact(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        match self.exp.cmp(&other.exp) {
            Ordering::Equal => BigFloat { mant: &self.mant + &other.mant, exp: self.exp },
            Ordering::Less => {
                let k = (other.exp - self.exp) as usize;
                BigFloat { mant: &self.mant + (&other.mant << k), exp: self.exp }
            }
            Ordering::Greater => {
                let k = (self.exp - other.exp) as usize;
                BigFloat { mant: (&self.mant << k) + &other.mant, exp: other.exp }
            }
        }
    }

    pub fn mul_exact(&self, other: &Self) -> Self {
        BigFloat { mant: &self.mant * &other.mant, exp: self.exp + other.exp }
    }

    /// Upper bound for `|self|`.
    pub fn mag(&self) -> Mag {
        if self.is_zero() {
            return Mag::ZERO;
        }
        let bits = self.mant.bits();
        let (top, shift) = if bits > 60 {
            ((self.mant.magnitude() >> (bits - 60)).to_u64().unwrap() + 1, bits as i64 - 60)
        } else {
            (self.mant.magnitude().to_u64().unwrap(), 0)
        };
        Mag::from_f64(top as f64).mul_f64(1.0 + 1e-15).shl(shift + self.exp)
    }

    /// Lower bound for `|self|` (zero when the value is zero).
    pub fn mag_lower(&self) -> Mag {
        if self.is_zero() {
            return Mag::ZERO;
        }
        Mag::pow2(self.top() - 1)
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits();
        let shift = bits.saturating_sub(60);
        let top = (&self.mant >> shift).to_f64().unwrap();
        let e = self.exp + shift as i64;
        if e > 2000 {
            return top.signum() * f64::INFINITY;
        }
        if e < -2200 {
            return 0.0;
        }
        // split the scaling so that intermediate powers stay finite
        let half = e / 2;
        top * 2f64.powi(half as i32) * 2f64.powi((e - half) as i32)
    }

    /// Nearest integer (ties away from zero) and the signed residual
    /// `self - nearest`.
    pub fn round_to_integer(&self) -> (BigInt, BigFloat) {
        if self.exp >= 0 {
            return (&self.mant << self.exp as usize, BigFloat::zero());
        }
        let k = (-self.exp) as usize;
        let half = BigInt::one() << (k - 1);
        let n = if self.mant.is_negative() {
            -((-&self.mant + &half) >> k)
        } else {
            (&self.mant + &half) >> k
        };
        let residual = self.add_exact(&BigFloat::from_bigint(-n.clone()));
        (n, residual)
    }

    /// `self / d` truncated to `prec` bits.
    pub fn div_int(&self, d: &BigInt, prec: u32) -> (Self, Mag) {
        assert!(!d.is_zero(), "division by zero");
        if self.is_zero() {
            return (BigFloat::zero(), Mag::ZERO);
        }
        let extra = (prec as i64 + d.bits() as i64 - self.mant.bits() as i64 + 2).max(0) as usize;
        let num = &self.mant << extra;
        let (q, _) = num.div_rem(d);
        let exp = self.exp - extra as i64;
        let (r, e) = BigFloat { mant: q, exp }.round(prec);
        // truncation of the integer quotient loses at most one unit of 2^exp
        (r, e.add(Mag::pow2(exp)))
    }

    /// `self / other` truncated to `prec` bits (center only; error returned).
    pub fn div(&self, other: &Self, prec: u32) -> (Self, Mag) {
        assert!(!other.is_zero(), "division by zero");
        let (q, e) = BigFloat { mant: self.mant.clone(), exp: self.exp - other.exp }.div_int(&other.mant, prec);
        (q, e)
    }

    pub fn cmp_value(&self, other: &Self) -> Ordering {
        self.add_exact(&other.neg()).mant.sign().cmp(&Sign::NoSign)
    }
}

impl fmt::Debug for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigFloat({:e})", self.to_f64())
    }
}

/// A real number known to lie in `[value - error_bound, value + error_bound]`.
#[derive(Clone, Debug)]
pub struct BigFloatWithError {
    pub value: BigFloat,
    pub error_bound: Mag,
    pub precision_bits: u32,
}

impl BigFloatWithError {
    pub fn exact(value: BigFloat, precision_bits: u32) -> Self {
        BigFloatWithError { value, error_bound: Mag::ZERO, precision_bits }
    }

    pub fn from_i64(n: i64, precision_bits: u32) -> Self {
        Self::exact(BigFloat::from_i64(n), precision_bits)
    }

    pub fn from_f64(x: f64, precision_bits: u32) -> Self {
        Self::exact(BigFloat::from_f64(x), precision_bits)
    }

    fn prec(&self, other: &Self) -> u32 {
        self.precision_bits.max(other.precision_bits)
    }

    pub fn with_precision(mut self, bits: u32) -> Self {
        self.precision_bits = bits;
        self
    }

    pub fn add(&self, other: &Self) -> Self {
        let prec = self.prec(other);
        let (v, e) = self.value.add_exact(&other.value).round(prec);
        BigFloatWithError { value: v, error_bound: self.error_bound.add(other.error_bound).add(e), precision_bits: prec }
    }

    pub fn neg(&self) -> Self {
        BigFloatWithError { value: self.value.neg(), ..self.clone() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let prec = self.prec(other);
        let (v, e) = self.value.mul_exact(&other.value).round(prec);
        let err = self
            .value
            .mag()
            .mul(other.error_bound)
            .add(other.value.mag().mul(self.error_bound))
            .add(self.error_bound.mul(other.error_bound))
            .add(e);
        BigFloatWithError { value: v, error_bound: err, precision_bits: prec }
    }

    pub fn mul_i64(&self, n: i64) -> Self {
        let (v, e) = self.value.mul_exact(&BigFloat::from_i64(n)).round(self.precision_bits);
        let err = self.error_bound.mul(Mag::from_f64(n.unsigned_abs() as f64)).add(e);
        BigFloatWithError { value: v, error_bound: err, precision_bits: self.precision_bits }
    }

    pub fn div_i64(&self, d: i64) -> Self {
        assert!(d != 0, "division by zero");
        let (v, e) = self.value.div_int(&BigInt::from(d), self.precision_bits);
        let err = self.error_bound.div_lower(Mag::from_f64(d.unsigned_abs() as f64)).add(e);
        BigFloatWithError { value: v, error_bound: err, precision_bits: self.precision_bits }
    }

    /// Ball division; `None` when the divisor ball contains zero.
    pub fn div(&self, other: &Self) -> Option<Self> {
        let lower = other.value.mag_lower();
        if !(other.error_bound < lower) {
            return None;
        }
        let prec = self.prec(other);
        let (q, e) = self.value.div(&other.value, prec);
        // |a/b - a0/b0| <= (|a0| rb + |b0| ra) / (|b0| (|b0| - rb))
        let denom_lower = lower_sub(lower, other.error_bound);
        let num = self.value.mag().mul(other.error_bound).add(other.value.mag().mul(self.error_bound));
        let err = num.div_lower(lower).div_lower(denom_lower).add(e);
        Some(BigFloatWithError { value: q, error_bound: err, precision_bits: prec })
    }

    pub fn shl(&self, k: i64) -> Self {
        BigFloatWithError { value: self.value.shl(k), error_bound: self.error_bound.shl(k), precision_bits: self.precision_bits }
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }

    /// True when the ball is certainly strictly positive.
    pub fn is_positive(&self) -> bool {
        self.value.sign() == Sign::Plus && self.error_bound < self.value.mag_lower()
    }

    /// Does the ball contain `x`?
    pub fn contains_f64(&self, x: f64) -> bool {
        let d = self.value.add_exact(&BigFloat::from_f64(x).neg());
        !(self.error_bound < d.mag_lower())
    }
}

/// Lower bound for `a - b` given `b < a` (a is itself a lower bound, b an upper bound).
fn lower_sub(a: Mag, b: Mag) -> Mag {
    let af = a.to_f64();
    let bf = b.to_f64();
    if af.is_finite() && af > 0.0 && af < 1e300 && bf.is_finite() {
        let d = (af - bf) * (1.0 - 4.0 * f64::EPSILON);
        if d > 0.0 {
            return Mag::from_f64(d);
        }
    }
    // fall back to a coarse bound: when b <= a/2 the difference is >= a/2
    if b.shl(1) <= a {
        return a.shl(-1);
    }
    Mag::ZERO
}

/// A complex number `re + i·im` with a single radius bounding the modulus of
/// the error.
#[derive(Clone, Debug)]
pub struct ComplexWithError {
    pub re: BigFloat,
    pub im: BigFloat,
    pub error_bound: Mag,
    pub precision_bits: u32,
}

impl ComplexWithError {
    pub fn from_real(x: &BigFloatWithError) -> Self {
        ComplexWithError { re: x.value.clone(), im: BigFloat::zero(), error_bound: x.error_bound, precision_bits: x.precision_bits }
    }

    pub fn from_parts(re: &BigFloatWithError, im: &BigFloatWithError) -> Self {
        ComplexWithError {
            re: re.value.clone(),
            im: im.value.clone(),
            error_bound: re.error_bound.add(im.error_bound),
            precision_bits: re.precision_bits.max(im.precision_bits),
        }
    }

    pub fn one(precision_bits: u32) -> Self {
        ComplexWithError { re: BigFloat::from_i64(1), im: BigFloat::zero(), error_bound: Mag::ZERO, precision_bits }
    }

    pub fn from_bigint(n: &BigInt, precision_bits: u32) -> Self {
        ComplexWithError { re: BigFloat::from_bigint(n.clone()), im: BigFloat::zero(), error_bound: Mag::ZERO, precision_bits }
    }

    /// Upper bound for the modulus of the center.
    pub fn center_mag(&self) -> Mag {
        self.re.mag().add(self.im.mag())
    }

    /// Upper bound for the modulus of any point of the ball.
    pub fn abs_upper(&self) -> Mag {
        self.center_mag().add(self.error_bound)
    }

    pub fn add(&self, other: &Self) -> Self {
        let prec = self.precision_bits.max(other.precision_bits);
        let (re, e1) = self.re.add_exact(&other.re).round(prec);
        let (im, e2) = self.im.add_exact(&other.im).round(prec);
        ComplexWithError { re, im, error_bound: self.error_bound.add(other.error_bound).add(e1).add(e2), precision_bits: prec }
    }

    pub fn neg(&self) -> Self {
        ComplexWithError { re: self.re.neg(), im: self.im.neg(), ..self.clone() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn conj(&self) -> Self {
        ComplexWithError { im: self.im.neg(), ..self.clone() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let prec = self.precision_bits.max(other.precision_bits);
        let rr = self.re.mul_exact(&other.re);
        let ii = self.im.mul_exact(&other.im);
        let ri = self.re.mul_exact(&other.im);
        let ir = self.im.mul_exact(&other.re);
        let (re, e1) = rr.add_exact(&ii.neg()).round(prec);
        let (im, e2) = ri.add_exact(&ir).round(prec);
        let err = self
            .center_mag()
            .mul(other.error_bound)
            .add(other.center_mag().mul(self.error_bound))
            .add(self.error_bound.mul(other.error_bound))
            .add(e1)
            .add(e2);
        ComplexWithError { re, im, error_bound: err, precision_bits: prec }
    }

    pub fn mul_real(&self, x: &BigFloatWithError) -> Self {
        self.mul(&ComplexWithError::from_real(x))
    }

    pub fn mul_bigint(&self, n: &BigInt) -> Self {
        let f = BigFloat::from_bigint(n.clone());
        let (re, e1) = self.re.mul_exact(&f).round(self.precision_bits);
        let (im, e2) = self.im.mul_exact(&f).round(self.precision_bits);
        let err = self.error_bound.mul(f.mag()).add(e1).add(e2);
        ComplexWithError { re, im, error_bound: err, precision_bits: self.precision_bits }
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f64_roundtrip_exact() {
        for &x in &[1.0, -2.5, 1e-300, 123456.789, -7e200] {
            assert_eq!(BigFloat::from_f64(x).to_f64(), x);
        }
    }

    #[test]
    fn rounding_to_integer() {
        let x = BigFloat::from_f64(-2.75);
        let (n, r) = x.round_to_integer();
        assert_eq!(n, BigInt::from(-3));
        assert_eq!(r.to_f64(), 0.25);
        let (n, _) = BigFloat::from_f64(1e20).round_to_integer();
        assert_eq!(n, BigInt::from(100000000000000000000u128));
    }

    #[test]
    fn division_error_is_bounded() {
        let one = BigFloatWithError::from_i64(1, 200);
        let three = BigFloatWithError::from_i64(3, 200);
        let q = one.div(&three).unwrap();
        let back = q.mul_i64(3);
        assert!(back.contains_f64(1.0));
        assert!(q.error_bound < Mag::pow2(-195));
        let z = BigFloatWithError { value: BigFloat::zero(), error_bound: Mag::pow2(-3), precision_bits: 64 };
        assert!(one.div(&z).is_none());
    }

    #[test]
    fn complex_mul_contains_exact_product() {
        let a = ComplexWithError::from_parts(&BigFloatWithError::from_f64(1.5, 64), &BigFloatWithError::from_f64(-2.0, 64));
        let b = ComplexWithError::from_parts(&BigFloatWithError::from_f64(0.25, 64), &BigFloatWithError::from_f64(3.0, 64));
        let p = a.mul(&b);
        assert_eq!(p.to_f64_pair(), (1.5 * 0.25 + 6.0, 4.5 - 0.5));
    }
}
