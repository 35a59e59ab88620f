use singmod::ffisogeny::{is_bad_prime, min_isogeny_degree, supersingular_config, PhiValues};
use singmod::modpoly::{pi_set_from, value_mod};
use singmod::DiscriminantPair;

#[test]
fn an_m_isogeny_bounds_the_minimal_degree() {
    for (d1, d2) in [(-3, -4), (-4, -7)] {
        let cfg = DiscriminantPair::new(d1, d2).unwrap();
        let v = PhiValues::new(&cfg);
        for m in 2..=20 {
            for p in pi_set_from(m, &v.get(m).unwrap(), &cfg) {
                if is_bad_prime(p, &cfg) || !supersingular_config(p, &cfg).unwrap().supersingular {
                    continue;
                }
                assert!(min_isogeny_degree(p, &v).unwrap().m_min <= m, "({d1},{d2}) m {m} p {p}");
            }
        }
    }
}

#[test]
fn minimal_degree_is_the_first_vanishing_degree() {
    let cfg = DiscriminantPair::new(-3, -4).unwrap();
    let v = PhiValues::new(&cfg);
    for p in [11u64, 23, 47, 59, 71, 83, 107, 131] {
        let r = min_isogeny_degree(p, &v).unwrap();
        let start = if r.j1 == r.j2 { 2 } else { 1 };
        let first = (start..=30).find(|&m| m % p != 0 && value_mod(&v.get(m).unwrap(), p) == 0);
        if r.m_min <= 30 {
            assert_eq!(first, Some(r.m_min), "p {p}");
        }
    }
}
