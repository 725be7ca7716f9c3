mod common;

use argforge::syntax::parse_source;
use common::{checks, corpus_files};

#[test]
fn round_trip_over_every_fixture() {
    if let Err(e) = checks::parser_round_trip() {
        panic!("{e}");
    }
}

#[test]
fn broken_fixtures_report_one_code() {
    let codes: Vec<(String, &str)> = corpus_files()
        .iter()
        .filter_map(|f| parse_source(&f.text).err().map(|e| (f.label.clone(), e.code())))
        .collect();
    assert_eq!(
        codes,
        vec![
            ("acme/ledger Generic.java".to_string(), "PARSE_FAIL"),
            ("orbit/sensors src/LexBad.java".to_string(), "LEX_FAIL"),
        ]
    );
}
