//! Wire-format checks for the serialised interface types.

use copies_core::constructions::{admissible_scale, ap_avoidance_certificate};
use copies_core::discrepancy::full_report;
use copies_core::pattern::{Pattern, Placement, RotationMatrix};
use copies_lab::jsonfmt::to_string_pinned;

#[test]
fn certificate_json_fields() {
    let scale = admissible_scale(1);
    let cert = ap_avoidance_certificate(8, &scale, 0.9, 1e-3).unwrap();
    let value = serde_json::to_value(cert).unwrap();
    let obj = value.as_object().unwrap();
    let mut keys: Vec<&str> = obj.keys().map(String::as_str).collect();
    keys.sort_unstable();
    let mut expected = [
        "n",
        "offset",
        "r_squared",
        "eps0",
        "a_grid_step",
        "max_discrepancy",
        "slack",
        "verdict",
    ];
    expected.sort_unstable();
    assert_eq!(keys, expected);
    assert_eq!(obj["n"], serde_json::json!(8));
    assert_eq!(obj["offset"], serde_json::json!(1));
    assert!((obj["r_squared"].as_f64().unwrap() - 1.618033988749895).abs() < 1e-12);
    assert!(obj["verdict"].is_boolean());
}

#[test]
fn discrepancy_report_field_names_are_snake_case() {
    let scale = admissible_scale(1);
    let seq = copies_core::constructions::quadratic_sequence(
        &copies_core::constructions::QuadraticSeq::at_scale(&scale, 0.0, 0.0, 4000),
    );
    let report = full_report(&seq).unwrap();
    let value = serde_json::to_value(report).unwrap();
    let mut keys: Vec<&str> = value.as_object().unwrap().keys().map(String::as_str).collect();
    keys.sort_unstable();
    let mut expected = [
        "n",
        "exact_star",
        "exact_extreme",
        "et_bound",
        "m",
        "h",
        "vdc_bound",
        "final_bound",
        "theorem_bound",
    ];
    expected.sort_unstable();
    assert_eq!(keys, expected);
}

#[test]
fn pattern_round_trips_through_the_file_format() {
    let pattern = Pattern::new(vec![vec![0.0, 0.0], vec![1.0, 0.5], vec![3.0, -1.0]]).unwrap();
    let rendered = to_string_pinned(&pattern);
    let value: serde_json::Value = serde_json::from_str(&rendered).unwrap();
    assert_eq!(value["dimension"], serde_json::json!(2));
    let points = value["points"].as_array().unwrap();
    assert_eq!(points.len(), 3);
    assert_eq!(points[2][0].as_f64(), Some(3.0));
}

#[test]
fn placement_serialises_with_row_major_rotation() {
    let placement = Placement {
        scale: 2.0,
        rotation: RotationMatrix::identity(2),
        translation: vec![1.0, -1.0],
    };
    let value = serde_json::to_value(&placement).unwrap();
    assert_eq!(value["scale"].as_f64(), Some(2.0));
    assert_eq!(value["rotation"][0][0].as_f64(), Some(1.0));
    assert_eq!(value["rotation"][0][1].as_f64(), Some(0.0));
    assert_eq!(value["rotation"][1][1].as_f64(), Some(1.0));
    assert_eq!(value["translation"][1].as_f64(), Some(-1.0));
}
