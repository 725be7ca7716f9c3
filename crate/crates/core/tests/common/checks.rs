//! One check per acceptance criterion. `Ok` carries a short summary of
//! what was measured, `Err` the first violation found.

use std::collections::BTreeSet;
use std::fs;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

use argforge::acquire::RepoSpec;
use argforge::filter::FilterCriteria;
use argforge::metrics::{
    format_metric, format_percent, metrics_exclusive, metrics_ui, tabulate, ConfusionCounts, MetricSet, Mode, Outcome,
    Rational, RunRecord,
};
use argforge::packaging::{corpus_manifest, emit_task_definition, BenchmarkArtifact, VerdictMap};
use argforge::pipeline::{run_pipeline, run_stages, StopAfter, TOOL_VERSION};
use argforge::property::Property;
use argforge::resolve::{build_type_table, classify_unit, Allowlist};
use argforge::syntax::ast::PrimType;
use argforge::syntax::{parse_source, pretty_print};
use argforge::transform::{transform_file, Provenance, TransformConfig, TransformStatus};

use super::oracle;
use super::{corpus_files, fixture_config, fixtures, golden, parsed_corpus, snapshot, strip_header, CountingFetcher};

pub type Check = Result<String, String>;

pub type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn artifact(id: usize, properties: Vec<(Property, Option<bool>)>) -> BenchmarkArtifact {
    let origin = format!("published/corpus@unknown B{id}.java");
    BenchmarkArtifact {
        id: format!("b{id}"),
        source: String::new(),
        task_definition: emit_task_definition(&properties, &origin),
        properties,
        origin,
        loc: 0,
    }
}

/// The published corpus: 68 benchmarks, 30 of them checked for both
/// properties; ReachSafety 31 true / 17 false, ExceptionProperty 39 true /
/// 11 false.
pub fn published_corpus() -> Vec<BenchmarkArtifact> {
    let reach: Vec<bool> = std::iter::repeat_n(true, 31).chain(std::iter::repeat_n(false, 17)).collect();
    let exc: Vec<bool> = std::iter::repeat_n(true, 39).chain(std::iter::repeat_n(false, 11)).collect();
    let mut out = Vec::new();
    for i in 0..30 {
        out.push(artifact(
            out.len(),
            vec![
                (Property::ReachSafety, Some(reach[i])),
                (Property::ExceptionProperty, Some(exc[i])),
            ],
        ));
    }
    for &v in &reach[30..] {
        out.push(artifact(out.len(), vec![(Property::ReachSafety, Some(v))]));
    }
    for &v in &exc[30..] {
        out.push(artifact(out.len(), vec![(Property::ExceptionProperty, Some(v))]));
    }
    out
}

pub fn manifest_consistency() -> Check {
    let m = corpus_manifest(&published_corpus());
    let rs = m.counts(Property::ReachSafety);
    let ep = m.counts(Property::ExceptionProperty);
    let got = (
        rs.benchmarks,
        rs.expected_true,
        rs.expected_false,
        ep.benchmarks,
        ep.expected_true,
        ep.expected_false,
        m.total_property_runs,
        m.benchmarks,
    );
    ensure(got == (48, 31, 17, 50, 39, 11, 98, 68), || format!("manifest counts {got:?}"))?;
    Ok(format!(
        "ReachSafety {} ({}/{}), ExceptionProperty {} ({}/{}), {} runs over {} benchmarks",
        rs.benchmarks, rs.expected_true, rs.expected_false, ep.benchmarks, ep.expected_true, ep.expected_false,
        m.total_property_runs, m.benchmarks
    ))
}

pub fn metric_formatting() -> Check {
    let set = MetricSet {
        mode: Mode::UndecidableInclusive,
        accuracy: None,
        precision: None,
        recall: Some(Rational::new(271, 1000)),
        specificity: None,
        pct_undecidable: Some(Rational::new(53, 100)),
    };
    let recall = format_metric(set.recall);
    let pct = format_percent(set.pct_undecidable);
    ensure(recall == "0.27", || format!("recall 0.271 rendered {recall:?}"))?;
    ensure(pct == "53%", || format!("undecidable 0.53 rendered {pct:?}"))?;
    Ok(format!("recall {recall}, undecidable {pct}"))
}

fn grid() -> Vec<(bool, Outcome)> {
    [true, false]
        .into_iter()
        .flat_map(|e| Outcome::ALL.into_iter().map(move |a| (e, a)))
        .collect()
}

pub fn metric_oracle() -> Check {
    let cells = grid();
    let cases = oracle::multisets(cells.len(), 5);
    for case in &cases {
        let recs: Vec<(bool, Outcome)> = case.iter().map(|&i| cells[i]).collect();
        let records: Vec<RunRecord> = recs
            .iter()
            .enumerate()
            .map(|(k, &(expected, actual))| RunRecord {
                benchmark: format!("b{k}"),
                property: if k % 2 == 0 { Property::ReachSafety } else { Property::ExceptionProperty },
                expected,
                actual,
            })
            .collect();
        let counts = tabulate(&records, None);
        ensure(oracle::matches_exclusive(&metrics_exclusive(&counts), &recs), || {
            format!("exclusive metrics differ for {recs:?}")
        })?;
        ensure(oracle::matches_inclusive(&metrics_ui(&counts), &recs), || {
            format!("inclusive metrics differ for {recs:?}")
        })?;
    }
    ensure(cases.len() == 3003, || format!("enumerated {} multisets", cases.len()))?;
    Ok(format!("{} multisets agree exactly", cases.len()))
}

fn at_most(ui: Option<Rational>, ex: Option<Rational>) -> bool {
    match (ui, ex) {
        (Some(u), Some(e)) => u <= e,
        (Some(u), None) => u == Rational::from_integer(0),
        (None, ex) => ex.is_none(),
    }
}

pub fn precision_and_dominance(cases: u32) -> Check {
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    let strategy = (0u64..60, 0u64..60, 0u64..60, 0u64..60, 0u64..60, 0u64..60);
    runner
        .run(&strategy, |(tp, tn, fp, fn_, u_pos, u_neg)| {
            let c = ConfusionCounts {
                tp,
                tn,
                fp,
                fn_,
                u_pos,
                u_neg,
            };
            let ex = metrics_exclusive(&c);
            let ui = metrics_ui(&c);
            prop_assert_eq!(ex.precision, ui.precision);
            prop_assert!(at_most(ui.accuracy, ex.accuracy), "accuracy {:?}", c);
            prop_assert!(at_most(ui.recall, ex.recall), "recall {:?}", c);
            prop_assert!(at_most(ui.specificity, ex.specificity), "specificity {:?}", c);
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(format!("{cases} random count sets, zero violations"))
}

pub fn parser_round_trip() -> Check {
    let parsed = parsed_corpus();
    ensure(parsed.len() >= 25, || format!("only {} parseable fixtures", parsed.len()))?;
    let mut covered = BTreeSet::new();
    for (f, unit) in &parsed {
        let printed = pretty_print(unit);
        let again = parse_source(&printed).map_err(|e| format!("{}: reparse failed: {e}", f.label))?;
        ensure(again.normalized() == unit.normalized(), || format!("{}: tree changed", f.label))?;
        ensure(pretty_print(&again) == printed, || format!("{}: printing not stable", f.label))?;
        covered.extend(oracle::productions(unit));
    }
    let missing: Vec<_> = oracle::all_productions().difference(&covered).cloned().collect();
    ensure(missing.is_empty(), || format!("productions never exercised: {missing:?}"))?;
    Ok(format!("{} fixtures, {} productions covered", parsed.len(), covered.len()))
}

pub fn filter_oracle() -> Check {
    let out = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut config = fixture_config(out.path());
    config.criteria = FilterCriteria {
        min_if_on_chosen_primitive: 1,
        ..FilterCriteria::default()
    };
    config.chosen_primitive_types = [PrimType::Int, PrimType::Double].into_iter().collect();
    let run = run_stages(&config, &CountingFetcher::default(), StopAfter::Filter).map_err(|e| e.to_string())?;
    let got: Vec<String> = run
        .accepted_files
        .iter()
        .map(|f| format!("{} {}", f.repo, f.relative_path))
        .collect();
    let text = fs::read_to_string(fixtures().join("expected_accepted.txt")).map_err(|e| e.to_string())?;
    let want: Vec<String> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect();
    ensure(got == want, || format!("accepted {got:?}\nexpected {want:?}"))?;
    let seen = run.report("filter").map_or(0, |r| r.inputs_seen);
    Ok(format!("{} of {} resolved files accepted, as labeled", got.len(), seen))
}

fn provenance(repo: &RepoSpec, path: &str, class: &str) -> Provenance {
    Provenance {
        repo: repo.clone(),
        original_path: path.to_string(),
        original_class: class.to_string(),
        tool_version: TOOL_VERSION.to_string(),
    }
}

pub fn transform_closure() -> Check {
    let allow = Allowlist::jdk_default();
    let config = TransformConfig::default();
    let mut transformed = 0;
    let mut statements = 0;
    for (f, unit) in parsed_corpus() {
        let Ok(table) = build_type_table(&unit, &allow) else {
            continue;
        };
        let prov = provenance(&f.repo, &f.relative_path, &unit.class.name);
        let outcome = transform_file(&unit, &table, &prov, &config);
        if outcome.status != TransformStatus::Transformed {
            continue;
        }
        transformed += 1;
        let text = pretty_print(outcome.unit.as_ref().expect("transformed unit"));
        let reparsed = parse_source(&text).map_err(|e| format!("{}: output does not parse: {e}", f.label))?;
        let out_table = build_type_table(&reparsed, &allow).map_err(|e| format!("{}: {e}", f.label))?;
        let cls = classify_unit(&reparsed, &out_table);
        ensure(cls.unresolved_total() == 0, || {
            format!("{}: {} unresolved after transformation", f.label, cls.unresolved_total())
        })?;
        let kept = oracle::preservation(&unit, &table, &outcome);
        ensure(kept.missing.is_empty(), || format!("{}: dropped {:?}", f.label, kept.missing))?;
        statements += kept.checked;
    }
    ensure(transformed >= 20, || format!("only {transformed} fixtures transformed"))?;
    Ok(format!(
        "{transformed} outputs closed; {statements} resolved statements preserved"
    ))
}

pub fn transform_idempotence() -> Check {
    let allow = Allowlist::jdk_default();
    let config = TransformConfig::default();
    let mut checked = 0;
    for (f, unit) in parsed_corpus() {
        let Ok(table) = build_type_table(&unit, &allow) else {
            continue;
        };
        let first = transform_file(&unit, &table, &provenance(&f.repo, &f.relative_path, &unit.class.name), &config);
        let Some(out) = first.unit.filter(|_| first.status == TransformStatus::Transformed) else {
            continue;
        };
        let text1 = pretty_print(&out);
        let reparsed = parse_source(&text1).map_err(|e| format!("{}: {e}", f.label))?;
        let table2 = build_type_table(&reparsed, &allow).map_err(|e| format!("{}: {e}", f.label))?;
        let prov2 = provenance(&RepoSpec::new("bench", "out", ""), "Main.java", "Main");
        let second = transform_file(&reparsed, &table2, &prov2, &config);
        ensure(second.status == TransformStatus::Transformed, || {
            format!("{}: second pass gave {:?}", f.label, second.status)
        })?;
        let text2 = pretty_print(second.unit.as_ref().expect("transformed unit"));
        ensure(strip_header(&text1) == strip_header(&text2), || {
            format!("{}: body changed on re-transformation\n{text1}\n---\n{text2}", f.label)
        })?;
        ensure(second.removals.is_empty() && second.injections.is_empty(), || {
            format!("{}: second pass removed or stubbed something", f.label)
        })?;
        checked += 1;
    }
    ensure(checked >= 20, || format!("only {checked} outputs re-transformed"))?;
    Ok(format!("{checked} outputs differ only in the provenance header"))
}

pub fn packaging_golden() -> Check {
    let out = tempfile::tempdir().map_err(|e| e.to_string())?;
    let root = out.path().join("bench");
    let config = fixture_config(&root);
    run_pipeline(&config, &CountingFetcher::default()).map_err(|e| e.to_string())?;
    let first = snapshot(&root);
    let layout: Vec<&str> = first.keys().map(String::as_str).collect();
    let want_layout = golden("layout.txt");
    let want_layout: Vec<&str> = want_layout.lines().collect();
    ensure(layout == want_layout, || format!("layout {layout:?}"))?;
    let pairs = [
        ("acme-ledger-ledger/acme-ledger-ledger.yml", "acme-ledger-ledger.yml"),
        ("orbit-sensors-sampler/orbit-sensors-sampler.yml", "orbit-sensors-sampler.yml"),
        ("orbit-sensors-thermo/orbit-sensors-thermo.yml", "orbit-sensors-thermo.yml"),
        ("acme-ledger-ledger/Main.java", "acme-ledger-ledger.Main.java"),
        ("manifest.json", "manifest.json"),
        ("stage_reports.json", "stage_reports.json"),
    ];
    for (emitted, gold) in pairs {
        let got = String::from_utf8_lossy(&first[emitted]);
        let want = golden(gold);
        ensure(got == want, || format!("{emitted} differs from golden\n{got}"))?;
    }
    // the omitted-verdict variant also checked in isolation
    let mut verdicts = VerdictMap::default();
    verdicts.insert("x", Property::ReachSafety, false);
    let yml = emit_task_definition(
        &[
            (Property::ReachSafety, verdicts.get("x", Property::ReachSafety)),
            (Property::ExceptionProperty, verdicts.get("x", Property::ExceptionProperty)),
        ],
        "acme/ledger@unknown Ledger.java",
    );
    ensure(yml == golden("acme-ledger-ledger.yml"), || format!("standalone yml differs\n{yml}"))?;
    // re-emitting into the same root leaves every byte as it was
    run_pipeline(&config, &CountingFetcher::default()).map_err(|e| e.to_string())?;
    ensure(snapshot(&root) == first, || "re-emission changed the tree".into())?;
    Ok(format!("{} files match golden layout; re-emission identical", first.len()))
}

pub fn pipeline_determinism() -> Check {
    let start = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let fetcher = CountingFetcher::default();
    let a = run_pipeline(&fixture_config(&dir.path().join("a")), &fetcher).map_err(|e| e.to_string())?;
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| e.to_string())?;
    let b = single
        .install(|| run_pipeline(&fixture_config(&dir.path().join("b")), &fetcher))
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(a.reports == b.reports, || "stage reports differ between runs".into())?;
    let (ta, tb) = (snapshot(&dir.path().join("a")), snapshot(&dir.path().join("b")));
    ensure(ta == tb, || {
        let diff: Vec<_> = ta.keys().filter(|k| ta.get(*k) != tb.get(*k)).collect();
        format!("output trees differ at {diff:?}")
    })?;
    ensure(fetcher.count() == 0, || format!("offline run fetched {} times", fetcher.count()))?;
    for r in &a.reports {
        ensure(r.accepted + r.rejected == r.inputs_seen, || format!("{} does not balance", r.stage))?;
    }
    let dirs = ta.keys().filter(|k| k.ends_with("/Main.java")).count();
    let packaged = a.report("package").map_or(0, |r| r.accepted) as usize;
    ensure(dirs == packaged && dirs == a.artifacts.len(), || {
        format!("{dirs} directories for {packaged} packaged files")
    })?;
    ensure(elapsed < Duration::from_secs(30), || format!("took {elapsed:?}"))?;
    let files = corpus_files().len();
    Ok(format!(
        "{} files in, {} benchmarks, trees identical ({} ms)",
        files,
        dirs,
        elapsed.as_millis()
    ))
}

/// Criterion name and check, in acceptance order.
pub fn all() -> Vec<Criterion> {
    vec![
        ("manifest consistency", manifest_consistency),
        ("metric formatting", metric_formatting),
        ("metric engine oracle equivalence", metric_oracle),
        ("precision invariance and mode dominance", || precision_and_dominance(10_000)),
        ("parser round trip", parser_round_trip),
        ("filter oracle", filter_oracle),
        ("transform closure", transform_closure),
        ("transform idempotence", transform_idempotence),
        ("packaging golden files", packaging_golden),
        ("pipeline determinism", pipeline_determinism),
    ]
}
