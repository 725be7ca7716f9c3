mod common;

use argforge::pipeline::{transform_source, TOOL_VERSION};
use argforge::resolve::Allowlist;
use argforge::syntax::pretty_print;
use argforge::transform::{Provenance, TransformConfig, TransformStatus};
use common::{checks, corpus_files, golden};

#[test]
fn outputs_are_closed_and_keep_resolved_logic() {
    if let Err(e) = checks::transform_closure() {
        panic!("{e}");
    }
}

#[test]
fn retransformation_only_touches_the_header() {
    if let Err(e) = checks::transform_idempotence() {
        panic!("{e}");
    }
}

#[test]
fn external_input_becomes_a_stub() {
    let f = corpus_files().into_iter().find(|f| f.label == "acme/ledger Ledger.java").unwrap();
    let prov = Provenance {
        repo: f.repo.clone(),
        original_path: f.relative_path.clone(),
        original_class: "Ledger".into(),
        tool_version: TOOL_VERSION.into(),
    };
    let out = transform_source(&f.text, &Allowlist::jdk_default(), &prov, &TransformConfig::default()).unwrap();
    assert_eq!(out.status, TransformStatus::Transformed);
    assert_eq!(pretty_print(out.unit.as_ref().unwrap()), golden("acme-ledger-ledger.Main.java"));
}

#[test]
fn files_without_invocable_code_are_rejected() {
    for (label, want) in [
        ("orbit/sensors src/Empty.java", TransformStatus::RejectedEmpty),
        ("acme/ledger Parser.java", TransformStatus::RejectedEmpty),
    ] {
        let f = corpus_files().into_iter().find(|f| f.label == label).unwrap();
        let prov = Provenance {
            repo: f.repo.clone(),
            original_path: f.relative_path.clone(),
            original_class: String::new(),
            tool_version: TOOL_VERSION.into(),
        };
        let out = transform_source(&f.text, &Allowlist::jdk_default(), &prov, &TransformConfig::default()).unwrap();
        assert_eq!(out.status, want, "{label}");
    }
}
