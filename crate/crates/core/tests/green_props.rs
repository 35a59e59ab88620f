use singmod::green::{green_value, CMPoint, GreenRequest};

fn pts(d1: i64, d2: i64) -> (CMPoint, CMPoint) {
    (CMPoint::of_discriminant(d1).unwrap(), CMPoint::of_discriminant(d2).unwrap())
}

#[test]
fn negative_and_symmetric() {
    for (d1, d2) in [(-3, -4), (-4, -7), (-3, -8), (-7, -8)] {
        let (z1, z2) = pts(d1, d2);
        for k in [3, 5, 7] {
            for m in 1..=4 {
                let req = GreenRequest::new(k, m, 1e-10).unwrap();
                let a = green_value(&req, &z1, &z2).unwrap();
                let b = green_value(&req, &z2, &z1).unwrap();
                assert!(a.value < 0.0, "({d1},{d2}) k {k} m {m}: {}", a.value);
                assert!((a.value - b.value).abs() <= 2e-10 * a.value.abs().max(1.0), "({d1},{d2}) k {k} m {m}");
            }
        }
    }
}

#[test]
fn widening_the_radius_stays_within_the_error() {
    let cases = [(-3, -4, 3, 1), (-3, -4, 3, 3), (-3, -4, 5, 2), (-3, -4, 7, 5), (-4, -7, 3, 2), (-4, -7, 5, 4), (-4, -7, 7, 1), (-3, -8, 3, 2), (-7, -8, 5, 3), (-7, -8, 7, 2)];
    for (d1, d2, k, m) in cases {
        let (z1, z2) = pts(d1, d2);
        let req = GreenRequest::new(k, m, 1e-9).unwrap();
        let base = green_value(&req, &z1, &z2).unwrap();
        let wide = green_value(&req.with_radius(base.radius + 2.0), &z1, &z2).unwrap();
        assert!(
            (base.value - wide.value).abs() <= base.error.max(1e-9 * base.value.abs()),
            "({d1},{d2}) k {k} m {m}: {} vs {} (error {})",
            base.value,
            wide.value,
            base.error
        );
    }
}
