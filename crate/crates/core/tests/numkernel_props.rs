use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use singmod::numkernel::{kronecker, legendre_p, legendre_q, BigFloatWithError};

#[test]
fn q_three_term_recurrence_holds_inside_error_bounds() {
    for i in 1..=100 {
        let t = BigFloatWithError::from_f64(1.0 + 9.0 * i as f64 / 100.0, 128);
        let q: Vec<BigFloatWithError> = (0..=9).map(|n| legendre_q(n, &t).unwrap()).collect();
        for n in 1..=8usize {
            let lhs = q[n + 1]
                .mul_i64(n as i64 + 1)
                .sub(&t.mul(&q[n]).mul_i64(2 * n as i64 + 1))
                .add(&q[n - 1].mul_i64(n as i64));
            assert!(lhs.contains_f64(0.0), "n={n} t={}: residual {} ± {:?}", t.to_f64(), lhs.to_f64(), lhs.error_bound);
        }
    }
}

#[test]
fn legendre_p_is_exact_on_rationals() {
    // clearing denominators: 2^n n!·P_n(a/b)·b^n is an integer for the recurrence
    for n in 0..=8usize {
        for (a, b) in [(1i64, 3i64), (-2, 7), (5, 4), (0, 1)] {
            let x = BigRational::new(BigInt::from(a), BigInt::from(b));
            let v = legendre_p(n, &x);
            let mut scale = BigInt::from(b).pow(n as u32) * BigInt::from(2).pow(n as u32);
            for j in 2..=n {
                scale *= j;
            }
            let scaled = v * BigRational::from_integer(scale);
            assert!(scaled.is_integer(), "P_{n}({a}/{b}) = {scaled}");
        }
    }
    // P_2(1/√3) = 0 seen through x² = 1/3
    let v = singmod::numkernel::legendre_p_even_at_square(2, &BigRational::new(1.into(), 3.into()));
    assert!(v.is_zero());
    assert!(legendre_p(5, &BigRational::one()).is_one());
}

proptest! {
    #[test]
    fn kronecker_multiplicative_in_top(a in 1i64..=200, b in 1i64..=200, n in 1i64..=200) {
        prop_assert_eq!(kronecker(a * b, n), kronecker(a, n) * kronecker(b, n));
    }

    #[test]
    fn kronecker_multiplicative_in_bottom(a in 1i64..=200, n in 1i64..=200, m in 1i64..=200) {
        prop_assert_eq!(kronecker(a, n * m), kronecker(a, n) * kronecker(a, m));
    }
}
