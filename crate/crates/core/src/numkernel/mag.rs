use std::cmp::Ordering;
use std::fmt;

/// Upper bound on a nonnegative real, stored as `mant * 2^exp` with
/// `mant` in `[0.5, 1)` (or zero). All arithmetic rounds upward, so a `Mag`
/// never understates the quantity it bounds. The exponent is unbounded in
/// practice, which matters for radii of products around `10^500`.
#[derive(Clone, Copy, PartialEq)]
pub struct Mag {
    mant: f64,
    exp: i64,
}

const UP: f64 = 1.0 + 4.0 * f64::EPSILON;

fn frexp(x: f64) -> (f64, i64) {
    if x == 0.0 || !x.is_finite() {
        return (x, 0);
    }
    let bits = x.to_bits();
    let raw_exp = ((bits >> 52) & 0x7ff) as i64;
    if raw_exp == 0 {
        // subnormal
        let (m, e) = frexp(x * 2f64.powi(64));
        return (m, e - 64);
    }
    let m = f64::from_bits((bits & !(0x7ffu64 << 52)) | (1022u64 << 52));
    (m, raw_exp - 1022)
}

impl Mag {
    pub const ZERO: Mag = Mag { mant: 0.0, exp: 0 };

    fn normalized(x: f64, exp: i64) -> Mag {
        debug_assert!(x >= 0.0 && x.is_finite());
        if x == 0.0 {
            return Mag::ZERO;
        }
        let (m, e) = frexp(x);
        Mag { mant: m, exp: exp + e }
    }

    /// Bound for a finite nonnegative `f64`; the conversion is exact.
    pub fn from_f64(x: f64) -> Mag {
        assert!(x.is_finite() && x >= 0.0, "Mag::from_f64 needs a finite nonnegative value, got {x}");
        Mag::normalized(x, 0)
    }

    /// `2^e`.
    pub fn pow2(e: i64) -> Mag {
        Mag { mant: 0.5, exp: e + 1 }
    }

    pub fn is_zero(&self) -> bool {
        self.mant == 0.0
    }

    /// Floor of log2 of the bound (`i64::MIN` for zero).
    pub fn exponent(&self) -> i64 {
        if self.is_zero() {
            i64::MIN
        } else {
            self.exp - 1
        }
    }

    pub fn add(self, other: Mag) -> Mag {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let (hi, lo) = if self.exp >= other.exp { (self, other) } else { (other, self) };
        let shift = hi.exp - lo.exp;
        let lo_scaled = if shift > 900 { 0.0 } else { lo.mant * 2f64.powi(-(shift as i32)) };
        // an underflowed low part still has to move the bound up
        let s = (hi.mant + lo_scaled.max(f64::EPSILON * 0.5)) * UP;
        Mag::normalized(s, hi.exp)
    }

    pub fn mul(self, other: Mag) -> Mag {
        if self.is_zero() || other.is_zero() {
            return Mag::ZERO;
        }
        Mag::normalized(self.mant * other.mant * UP, self.exp + other.exp)
    }

    pub fn mul_f64(self, c: f64) -> Mag {
        self.mul(Mag::from_f64(c))
    }

    /// Multiply by `2^k`.
    pub fn shl(self, k: i64) -> Mag {
        if self.is_zero() {
            self
        } else {
            Mag { mant: self.mant, exp: self.exp + k }
        }
    }

    /// Upper bound for `self / c` with `c > 0` given as a lower bound.
    pub fn div_lower(self, c: Mag) -> Mag {
        assert!(!c.is_zero(), "division by a zero lower bound");
        if self.is_zero() {
            return self;
        }
        Mag::normalized(self.mant / c.mant * UP, self.exp - c.exp)
    }

    /// Approximate value; `inf` when out of `f64` range.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        if self.exp > 1100 {
            return f64::INFINITY;
        }
        if self.exp < -1100 {
            return 0.0;
        }
        self.mant * 2f64.powi(self.exp as i32)
    }

    /// Natural logarithm of the bound, approximately (for reporting).
    pub fn ln(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        self.mant.ln() + self.exp as f64 * std::f64::consts::LN_2
    }

    /// Upper bound for `exp(self) - 1`, valid for any size.
    pub fn expm1(self) -> Mag {
        let x = self.to_f64();
        if x.is_infinite() {
            return Mag { mant: 0.5, exp: i64::MAX / 4 };
        }
        let v = x.exp_m1() * UP * UP;
        if v.is_infinite() {
            // exp(x) = 2^(x / ln 2)
            let e = (x / std::f64::consts::LN_2).ceil() as i64 + 1;
            return Mag::pow2(e);
        }
        Mag::normalized(v, 0)
    }
}

impl PartialOrd for Mag {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Less),
            (false, true) => Some(Ordering::Greater),
            _ => Some(self.exp.cmp(&other.exp).then(self.mant.partial_cmp(&other.mant).unwrap())),
        }
    }
}

impl fmt::Debug for Mag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            write!(f, "Mag(0)")
        } else {
            write!(f, "Mag({}·2^{})", self.mant, self.exp)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frexp_roundtrip() {
        for &x in &[1.0, 0.75, 3.5e-300, 1e300, 5e-320] {
            let (m, e) = frexp(x);
            assert!((0.5..1.0).contains(&m));
            // scale in two steps so neither factor over- or underflows
            let half = e as i32 / 2;
            assert_eq!(m * 2f64.powi(half) * 2f64.powi(e as i32 - half), x);
        }
    }

    #[test]
    fn ordering_and_arith() {
        let a = Mag::from_f64(3.0);
        let b = Mag::pow2(-2000);
        assert!(b < a);
        assert!(a.add(b) >= a);
        assert!(a.mul(a).to_f64() >= 9.0);
        assert_eq!(Mag::pow2(10).to_f64(), 1024.0);
        let huge = Mag::pow2(5000).mul(Mag::pow2(5000));
        assert_eq!(huge.exponent(), 10000);
    }
}
