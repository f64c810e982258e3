use cpm_core::ribbon::{
    faces, graph_from_json, graph_to_json, make_dualizable, make_wheel, validate_chordal, DualizableSpec,
};
use proptest::prelude::*;
use serde_json::json;

#[test]
fn graph_json_round_trip() {
    for g in [make_wheel(1, 1).unwrap(), make_wheel(2, 3).unwrap()] {
        let back = graph_from_json(&graph_to_json(&g)).unwrap();
        assert_eq!(back, g);
    }
}

// found by the graph fuzz target: a listed vertex with no cyclic order
#[test]
fn vertex_without_cyclic_order_is_rejected() {
    let mut v = graph_to_json(&make_wheel(1, 1).unwrap());
    v["vertices"].as_array_mut().unwrap().push(json!(999));
    match graph_from_json(&v) {
        Err(_) => {}
        Ok(g) => {
            assert!(validate_chordal(&g).iter().any(|m| m.contains("999")));
            assert!(faces(&g).is_err());
        }
    }
}

#[test]
fn garbage_is_an_error() {
    for v in [json!(null), json!([]), json!({"vertices": "x"}), json!({"vertices": [0]})] {
        if let Ok(g) = graph_from_json(&v) {
            assert!(faces(&g).is_err());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn dualizable_euler_characteristic(genus in 0u8..2, w in prop::collection::vec(1usize..4, 2..5)) {
        prop_assume!(genus == 1 || w.len() >= 2);
        let Ok(spec) = DualizableSpec::new(genus, w.clone()) else { return Ok(()) };
        let g = make_dualizable(&spec).unwrap();
        let f = faces(&g).unwrap();
        prop_assert_eq!(f.genus, genus as i64);
        prop_assert!(validate_chordal(&g).is_empty());
    }
}
