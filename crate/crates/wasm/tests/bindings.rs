use singmod_wasm::{cusp_table, min_degree, pi_set};

#[test]
fn pi_set_values() {
    let v = pi_set(-3, -4, 1).unwrap();
    assert_eq!(v["value"], "-1728");
    assert_eq!(v["pi"], serde_json::json!([2, 3]));
    assert!(pi_set(-3, -4, 0).is_err());
    assert!(pi_set(-3, -12, 1).is_err());
}

#[test]
fn min_degree_values() {
    let v = min_degree(-3, -4, 11).unwrap();
    assert_eq!((v["m_min"].as_u64(), v["bound"].as_u64()), (Some(2), Some(2)));
    assert!(min_degree(-3, -4, 13).unwrap_err().contains("supersingular"));
    assert!(min_degree(-3, -4, 5000).is_err());
}

#[test]
fn cusp_values() {
    let v = cusp_table(12).unwrap();
    assert_eq!((v["index"].as_u64(), v["psi_vol"].as_u64()), (Some(24), Some(288)));
    let widths: u64 = v["cusps"].as_array().unwrap().iter().map(|c| c["width"].as_u64().unwrap()).sum();
    assert_eq!(widths, 24);
    assert!(cusp_table(0).is_err());
}
