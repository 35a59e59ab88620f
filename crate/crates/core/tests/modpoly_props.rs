use num_bigint::BigInt;

use singmod::modpoly::{non_split_in_both, phi_value, pi_set, prime_bound, prime_floor_ok, reverify};
use singmod::DiscriminantPair;

#[test]
fn swapping_the_curves() {
    for (d1, d2) in [(-3, -4), (-4, -7), (-7, -8)] {
        let a = DiscriminantPair::new(d1, d2).unwrap();
        let b = DiscriminantPair::new(d2, d1).unwrap();
        assert_eq!(phi_value(1, &a).unwrap().value, -phi_value(1, &b).unwrap().value);
        for m in 2..=5 {
            assert_eq!(phi_value(m, &a).unwrap().value, phi_value(m, &b).unwrap().value, "({d1},{d2}) m {m}");
        }
    }
}

#[test]
fn prime_sets_respect_support_and_floors() {
    for (d1, d2) in [(-3, -4), (-4, -7), (-3, -8), (-7, -8)] {
        let cfg = DiscriminantPair::new(d1, d2).unwrap();
        for m in 1..=12 {
            for p in pi_set(m, &cfg).unwrap() {
                assert!(p <= prime_bound(m, &cfg) && non_split_in_both(p, &cfg));
                assert!(p <= 3 || prime_floor_ok(p, m), "({d1},{d2}) m {m} p {p}");
            }
        }
    }
}

#[test]
fn certificates_reproduce_at_higher_precision() {
    let cfg = DiscriminantPair::new(-4, -7).unwrap();
    for m in [1, 2, 6, 9] {
        let cert = phi_value(m, &cfg).unwrap();
        assert!(reverify(&cert, &cfg, 64).unwrap());
        let mut forged = cert.clone();
        forged.value += BigInt::from(1);
        assert!(!reverify(&forged, &cfg, 64).unwrap());
    }
}
