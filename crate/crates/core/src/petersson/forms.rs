//! Cusp forms given by integer q-expansions (optionally with an η-product
//! description), truncated coefficient sums and the Siegel-strip integral.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::divisors;
use crate::numkernel::quadrature::compensated_sum;
use crate::numkernel::special::tail_integral_f64;
use crate::qseries::{euler_product, series_dilate, series_mul, series_power};
use crate::{Error, Result};

/// A cusp form `f = Σ_{n>=1} a(n) qⁿ` on `Γ0(N)` of weight `κ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormData {
    pub name: String,
    pub level: u64,
    pub weight: u32,
    /// `coeffs[n − 1] = a(n)`.
    pub coeffs: Vec<BigInt>,
    /// `f = scale·∏ η(δz)^{r_δ}` when known, as `(δ, r_δ)` pairs.
    pub eta: Option<Vec<(u64, i64)>>,
    pub scale: i64,
}

impl FormData {
    /// The η-product `∏ η(δz)^{r_δ}`, which must have integral order 1 at ∞
    /// (`Σ δ·r_δ = 24`), weight `Σ r_δ / 2` and every `δ | N`.
    pub fn eta_product(name: &str, level: u64, factors: &[(u64, i64)], len: usize) -> Result<Self> {
        let order: i64 = factors.iter().map(|&(d, r)| d as i64 * r).sum();
        let twice_weight: i64 = factors.iter().map(|&(_, r)| r).sum();
        if order != 24 || twice_weight <= 0 || twice_weight % 2 != 0 || factors.iter().any(|&(d, _)| level % d != 0) {
            return Err(Error::Domain(format!("unsupported η-product {factors:?} at level {level}")));
        }
        let euler = euler_product(len);
        let mut series = vec![BigInt::zero(); len];
        if len > 0 {
            series[0] = 1.into();
        }
        for &(d, r) in factors {
            let factor = series_power(&series_dilate(&euler, d as usize, len), r, len);
            series = series_mul(&series, &factor, len);
        }
        Ok(Self {
            name: name.to_string(),
            level,
            weight: (twice_weight / 2) as u32,
            coeffs: series,
            eta: Some(factors.to_vec()),
            scale: 1,
        })
    }

    /// `k·f`.
    pub fn scaled(&self, k: i64) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c *= k);
        out.scale *= k;
        out
    }

    pub fn zero(level: u64, weight: u32, len: usize) -> Self {
        Self { name: "zero".into(), level, weight, coeffs: vec![BigInt::zero(); len], eta: None, scale: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.scale == 0 || self.coeffs.iter().all(|c| c.is_zero())
    }

    /// `a(n)`, `n >= 1`.
    pub fn coeff(&self, n: usize) -> Option<&BigInt> {
        n.checked_sub(1).and_then(|i| self.coeffs.get(i))
    }

    /// `f(z)` from the q-expansion, as `(re, im)`. Needs `Im z` large enough
    /// for the available coefficients.
    pub fn eval_q(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        let r = (-2.0 * std::f64::consts::PI * y).exp();
        let (mut re, mut im) = (0.0, 0.0);
        let mut last = 0.0;
        for (i, c) in self.coeffs.iter().enumerate() {
            let n = (i + 1) as f64;
            let c = c.to_f64().unwrap_or(f64::INFINITY);
            let mag = r.powf(n);
            let arg = 2.0 * std::f64::consts::PI * n * x;
            re += c * mag * arg.cos();
            im += c * mag * arg.sin();
            // Deligne: |a(n)| <= d(n)·n^{(κ−1)/2} <= 2n^{κ/2}
            last = 2.0 * n.powf(self.weight as f64 / 2.0) * mag;
        }
        if last > 1e-18 * (re.hypot(im)).max(1e-300) && last > 1e-300 {
            return Err(Error::InsufficientCoefficients { needed: self.coeffs.len() + 1, available: self.coeffs.len() });
        }
        Ok((re, im))
    }

    /// `|f(z)|²·(Im z)^κ`, invariant under `Γ0(N)`.
    ///
    /// For an η-product this is `scale²·∏_δ δ^{−r_δ/2}·H(δz)^{r_δ}` with
    /// `H(w) = |η(w)|²·(Im w)^{1/2}` invariant under all of `SL_2(ℤ)`, so it
    /// can be evaluated at any point after reducing each `δz`. Without an
    /// η-product only level 1 is supported (reduce, then sum the q-series).
    pub fn density(&self, x: f64, y: f64) -> Result<f64> {
        if self.is_zero() {
            return Ok(0.0);
        }
        if let Some(factors) = &self.eta {
            let mut log = 2.0 * (self.scale.abs() as f64).ln();
            for &(d, r) in factors {
                let df = d as f64;
                log += r as f64 * (2.0 * log_eta_invariant(df * x, df * y) - 0.5 * df.ln());
            }
            return Ok(log.exp());
        }
        if self.level != 1 {
            return Err(Error::Domain(format!("{}: pointwise values at level {} need an η-product", self.name, self.level)));
        }
        let (rx, ry) = reduce(x, y);
        let (re, im) = self.eval_q(rx, ry)?;
        Ok((re * re + im * im) * ry.powi(self.weight as i32))
    }
}

/// Move `x + iy` into the standard fundamental domain of `SL_2(ℤ)`.
pub fn reduce(mut x: f64, mut y: f64) -> (f64, f64) {
    for _ in 0..10_000 {
        x -= x.round();
        let r2 = x * x + y * y;
        if r2 >= 1.0 - 1e-14 {
            break;
        }
        x = -x / r2;
        y /= r2;
    }
    (x, y)
}

/// `log|η(w)| + ¼·log Im w`, an `SL_2(ℤ)`-invariant function.
pub fn log_eta_invariant(x: f64, y: f64) -> f64 {
    let (x, y) = reduce(x, y);
    let two_pi = 2.0 * std::f64::consts::PI;
    let r = (-two_pi * y).exp();
    let mut log = -two_pi * y / 24.0 + 0.25 * y.ln();
    let mut rn = r;
    let mut n = 1.0;
    while rn > 1e-18 {
        let arg = two_pi * n * x;
        // |1 − qⁿ|² = 1 − 2|q|ⁿcos + |q|^{2n}
        log += 0.5 * (1.0 - 2.0 * rn * arg.cos() + rn * rn).ln();
        n += 1.0;
        rn *= r;
    }
    log
}

/// `Δ = η(z)^24`, `η(z)²η(11z)²` and `η(2z)^12`, with `len` coefficients each.
pub fn corpus(len: usize) -> Vec<FormData> {
    vec![
        FormData::eta_product("delta", 1, &[(1, 24)], len).expect("valid η-product"),
        FormData::eta_product("eta11", 11, &[(1, 2), (11, 2)], len).expect("valid η-product"),
        FormData::eta_product("eta2z12", 4, &[(2, 12)], len).expect("valid η-product"),
    ]
}

/// `S_f(X) = Σ_{n <= X} |a(n)|²·n^{1−κ}`, exactly.
pub fn s_f(x: f64, f: &FormData) -> Result<BigRational> {
    if !(x >= 1.0) {
        return Ok(BigRational::zero());
    }
    let top = x.floor() as usize;
    if top > f.coeffs.len() {
        return Err(Error::InsufficientCoefficients { needed: top, available: f.coeffs.len() });
    }
    let mut total = BigRational::zero();
    for n in 1..=top {
        let a = &f.coeffs[n - 1];
        if a.is_zero() {
            continue;
        }
        let denom = BigInt::from(n).pow(f.weight - 1);
        total += BigRational::new(a * a, denom);
    }
    Ok(total)
}

/// `I_f(Y)` with the size of what was left out.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StripIntegral {
    pub value: f64,
    /// Bound on the omitted terms from `|a(n)|² <= d(n)²·n^{κ−1}`.
    pub tail_bound: f64,
    pub terms: usize,
}

/// `I_f(Y) = Σ_n |a(n)|² ∫_Y^∞ e^{−4πny} y^{κ−2} dy`, summed while the
/// remaining terms can matter, with a Deligne-bound estimate of the rest.
/// The corpus forms are Hecke newforms, for which that bound holds.
pub fn i_f(y: f64, f: &FormData) -> Result<StripIntegral> {
    if !(y > 0.0) {
        return Err(Error::Domain(format!("I_f needs Y > 0, got {y}")));
    }
    if f.is_zero() {
        return Ok(StripIntegral { value: 0.0, tail_bound: 0.0, terms: 0 });
    }
    let kappa = f.weight;
    let bound_term = |n: usize| {
        let d = divisors(n as u64).len() as f64;
        d * d * (n as f64).powi(kappa as i32 - 1) * tail_integral_f64(n as u64, y, kappa)
    };
    let mut terms = Vec::new();
    let mut n = 1;
    while n <= f.coeffs.len() {
        let a = f.coeffs[n - 1].abs().to_f64().unwrap_or(f64::INFINITY);
        terms.push(a * a * tail_integral_f64(n as u64, y, kappa));
        // stop once the Deligne envelope of the next block is negligible
        if n >= 8 && bound_term(n) < 1e-22 * terms.iter().sum::<f64>() {
            break;
        }
        n += 1;
    }
    let value = compensated_sum(terms.iter().copied());
    let mut tail = 0.0;
    let mut m = terms.len() + 1;
    loop {
        let t = bound_term(m);
        tail += t;
        if t < 1e-30 * value.max(1e-300) || m > terms.len() + 1_000_000 {
            break;
        }
        m += 1;
    }
    Ok(StripIntegral { value, tail_bound: tail, terms: terms.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn corpus_coefficients() {
        let c = corpus(12);
        let tau: Vec<i64> = c[0].coeffs.iter().map(|x| x.to_i64().unwrap()).collect();
        assert_eq!(tau[..6], [1, -24, 252, -1472, 4830, -6048]);
        // the elliptic curve 11a: a_p = p + 1 − #E(F_p)
        let e11: Vec<i64> = c[1].coeffs.iter().map(|x| x.to_i64().unwrap()).collect();
        assert_eq!(e11[..10], [1, -2, -1, 2, 1, 2, -2, 0, -2, -2]);
        let l4: Vec<i64> = c[2].coeffs.iter().map(|x| x.to_i64().unwrap()).collect();
        assert_eq!(l4[..7], [1, 0, -12, 0, 54, 0, -88]);
        assert_eq!((c[0].weight, c[1].weight, c[2].weight), (12, 2, 6));
    }

    #[test]
    fn eta_density_matches_q_series() {
        for f in corpus(400) {
            for &(x, y) in &[(0.1, 0.9), (-0.37, 1.3), (0.25, 0.5)] {
                let (re, im) = f.eval_q(x, y).unwrap();
                let direct = (re * re + im * im) * f64::powi(y, f.weight as i32);
                let viaeta = f.density(x, y).unwrap();
                assert!((direct - viaeta).abs() < 1e-10 * direct.max(1e-300), "{} at ({x}, {y}): {direct} vs {viaeta}", f.name);
            }
        }
        // and Γ0(11)-invariance: z ↦ z/(11z + 1)
        let f = &corpus(10)[1];
        let (x, y) = (0.2, 0.7);
        let (re, im) = (11.0 * x + 1.0, 11.0 * y);
        let r2 = re * re + im * im;
        let (gx, gy) = ((x * re + y * im) / r2, y / r2);
        assert!((f.density(x, y).unwrap() / f.density(gx, gy).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn truncated_sums() {
        let delta = &corpus(10)[0];
        assert_eq!(s_f(0.5, delta).unwrap(), BigRational::zero());
        assert_eq!(s_f(2.0, delta).unwrap(), BigRational::new(41.into(), 32.into()));
        assert!(s_f(3.0, delta).unwrap() >= s_f(2.0, delta).unwrap());
        assert!(matches!(s_f(11.0, delta), Err(Error::InsufficientCoefficients { .. })));
        let one = i_f(1.0, delta).unwrap();
        let first = tail_integral_f64(1, 1.0, 12);
        assert!((one.value - first) / first < 1e-2 && one.value >= first);
        assert!(i_f(0.5, delta).unwrap().value > one.value);
        assert!(i_f(40.0, delta).unwrap().value < 1e-200);
    }
}
