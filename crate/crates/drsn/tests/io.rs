use drsn::io::{
    field_to_json, parse_complex_list, parse_field, parse_series, parse_uni_series, series_to_json,
    uni_series_to_json,
};
use drsn::random::random_strict_field;
use drsn::series::{MultiSeries, UniSeries};
use drsn::{Error, C64};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

const MODEL: &str = r#"{
  "components": {
    "comp_y1": {"x_order": 4, "y_order": 2, "terms": [
      {"m": 0, "n1": 1, "n2": 0, "re": -1.0, "im": 0.0},
      {"m": 1, "n1": 1, "n2": 0, "re": 0.5, "im": 0.0}
    ]},
    "comp_y2": {"x_order": 4, "y_order": 2, "terms": [
      {"m": 0, "n1": 0, "n2": 1, "re": 1.0, "im": 0.0},
      {"m": 1, "n1": 0, "n2": 1, "re": 0.75, "im": 0.0}
    ]}
  }
}"#;

#[test]
fn series_round_trip_is_sorted_and_exact() {
    let s = MultiSeries::from_terms(
        5,
        3,
        [
            (drsn::series::MultiIndex::new(3, 0, 2), c(0.1, -2.0)),
            (drsn::series::MultiIndex::new(0, 1, 1), c(1.0 / 3.0, 0.0)),
            (drsn::series::MultiIndex::new(1, 2, 0), c(-7.5e-9, 1e5)),
        ],
    );
    let text = series_to_json(&s);
    let back = parse_series(&text).unwrap();
    assert_eq!(back, s);
    let first = text.find("\"m\": 0").unwrap();
    let last = text.find("\"m\": 3").unwrap();
    assert!(first < last);
    assert_eq!(series_to_json(&back), text);
}

#[test]
fn parse_errors_carry_a_location() {
    let err = parse_series("{\n  \"x_order\": 3,\n  \"y_order\": oops\n}").unwrap_err();
    match err {
        Error::Parse(msg) => assert!(msg.contains("line 3"), "{msg}"),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn series_validation_rejects_bad_terms() {
    let head = r#"{"x_order": 2, "y_order": 2, "terms": ["#;
    let bad = [
        r#"{"m": 2, "n1": 0, "n2": 0, "re": 1, "im": 0}"#,
        r#"{"m": 0, "n1": 2, "n2": 1, "re": 1, "im": 0}"#,
        r#"{"m": 0, "n1": 1, "n2": 0, "re": 1, "im": 0}, {"m": 0, "n1": 1, "n2": 0, "re": 1, "im": 0}"#,
        r#"{"m": 1, "n1": 0, "n2": 0, "re": 1, "im": 0}, {"m": 0, "n1": 1, "n2": 0, "re": 1, "im": 0}"#,
        r#"{"m": 0, "n1": 0, "n2": 0, "re": 1, "im": 0, "extra": 1}"#,
    ];
    for b in bad {
        assert!(
            matches!(parse_series(&format!("{head}{b}]}}")), Err(Error::Parse(_))),
            "{b}"
        );
    }
}

#[test]
fn diagonal_field_loads_with_identity_change() {
    let loaded = parse_field(MODEL).unwrap();
    assert_eq!(loaded.field.lambda, c(1.0, 0.0));
    assert_eq!(loaded.field.residue, c(1.25, 0.0));
    assert!(loaded.diagonalizing.is_identity(0.0));
}

#[test]
fn declared_lambda_must_match() {
    let with = MODEL.replacen(
        "{\n  \"components\"",
        "{\n  \"lambda\": {\"re\": 2.0, \"im\": 0.0},\n  \"components\"",
        1,
    );
    assert!(matches!(parse_field(&with), Err(Error::Shape(_))));
    let ok = MODEL.replacen(
        "{\n  \"components\"",
        "{\n  \"lambda\": {\"re\": 1.0, \"im\": 0.0},\n  \"components\"",
        1,
    );
    assert!(parse_field(&ok).is_ok());
}

#[test]
fn non_saddle_node_is_rejected() {
    let text = MODEL.replace("\"re\": -1.0", "\"re\": -2.0");
    assert!(matches!(parse_field(&text), Err(Error::NotASaddleNode(_))));
}

#[test]
fn mismatched_component_orders_are_rejected() {
    let text = MODEL.replacen("\"x_order\": 4", "\"x_order\": 5", 1);
    assert!(matches!(parse_field(&text), Err(Error::Shape(_))));
}

#[test]
fn field_round_trip() {
    let f = random_strict_field(3, 5, 4).unwrap();
    let text = field_to_json(&f);
    let back = parse_field(&text).unwrap();
    assert_eq!(back.field.field, f.field);
    assert_eq!(back.field.lambda, f.lambda);
}

#[test]
fn uni_series_round_trip() {
    let s = UniSeries::from_coeffs(3, &[c(0.0, 0.0), c(1.0, 0.5), c(-2.0, 0.0)]);
    assert_eq!(parse_uni_series(&uni_series_to_json(&s)).unwrap(), s);
    assert!(parse_uni_series(r#"{"coeffs": []}"#).is_err());
}

#[test]
fn complex_list_parses_each_item() {
    assert_eq!(
        parse_complex_list("-0.1, 0.2+0.1i,-i").unwrap(),
        vec![c(-0.1, 0.0), c(0.2, 0.1), c(0.0, -1.0)]
    );
}

proptest! {
    #[test]
    fn random_series_round_trip(
        terms in prop::collection::vec((0usize..6, 0usize..4, 0usize..4, -1e3f64..1e3, -1e3f64..1e3), 0..20)
    ) {
        let s = MultiSeries::from_terms(
            6,
            6,
            terms.iter().map(|(m, a, b, re, im)| (drsn::series::MultiIndex::new(*m, *a, *b), c(*re, *im))),
        );
        let back = parse_series(&series_to_json(&s)).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn parsers_never_panic(text in "\\PC{0,64}") {
        let _ = parse_series(&text);
        let _ = parse_field(&text);
        let _ = parse_uni_series(&text);
        let _ = parse_complex_list(&text);
    }
}
