use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use singmod::quadfield::{diff_set, enumerate_trace_m, factor_element, DiscriminantPair, FieldElement};

fn configs() -> Vec<DiscriminantPair> {
    [(-3, -4), (-4, -7), (-3, -8), (-7, -8), (-3, -11)]
        .into_iter()
        .map(|(a, b)| DiscriminantPair::new(a, b).unwrap())
        .collect()
}

#[test]
fn factorization_norm_matches_element_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for cfg in configs() {
        for _ in 0..500 {
            let b = rng.gen_range(-60i64..=60);
            let mut a = rng.gen_range(-400i64..=400);
            if (a - b * cfg.d).rem_euclid(2) != 0 {
                a += 1;
            }
            let alpha = FieldElement::new(a, b, cfg.d).unwrap();
            if alpha.is_zero() {
                continue;
            }
            let f = factor_element(&alpha, &cfg).unwrap();
            assert_eq!(f.norm(), alpha.norm(cfg.d).unsigned_abs(), "{alpha:?} in {cfg}");
        }
    }
}

#[test]
fn diff_set_is_conjugation_equivariant() {
    for cfg in configs() {
        for m in 1..=10 {
            for t in enumerate_trace_m(m, &cfg) {
                // −t′ has numerator (−a + m√D)/2
                let minus_conj = FieldElement::new(-t.a, t.b, cfg.d).unwrap();
                let mut expect: Vec<_> = diff_set(&t, &cfg).unwrap().iter().map(|q| q.conjugate(cfg.d)).collect();
                expect.sort();
                let mut got = diff_set(&minus_conj, &cfg).unwrap();
                got.sort();
                assert_eq!(got, expect, "t = {t:?}, m = {m}, cfg {cfg}");
            }
        }
    }
}

#[test]
fn diff_set_has_odd_cardinality() {
    for cfg in configs() {
        for m in 1..=10 {
            for t in enumerate_trace_m(m, &cfg) {
                // every enumerated t is totally positive, so Nm(t) > 0
                let n = diff_set(&t, &cfg).unwrap().len();
                assert_eq!(n % 2, 1, "t = {t:?}, m = {m}, cfg {cfg}");
            }
        }
    }
}
