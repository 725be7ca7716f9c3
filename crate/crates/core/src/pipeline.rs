//! Batch orchestration: acquire, enumerate, parse, resolve, filter,
//! transform and package, with one report per stage.
//!
//! Files are independent work units processed in parallel; every merge
//! happens in (repository, relative path) order so output never depends on
//! scheduling.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::acquire::{acquire, enumerate_sources, parse_repo_list, Fetcher, LineDiagnostic, SourceFile};
use crate::config::{ConfigError, PipelineConfig};
use crate::filter::{accept, profile_classified, FeatureProfile, FilterCriteria};
use crate::packaging::{corpus_manifest, BenchmarkArtifact, CorpusManifest, PackageError, Packager, VerdictMap};
use crate::resolve::{build_type_table, classify_unit, Allowlist};
use crate::syntax::ast::PrimType;
use crate::syntax::parse_source;
use crate::transform::{transform_file, Provenance, TransformConfig, TransformOutcome};

pub const TOOL_VERSION: &str = concat!("argforge ", env!("CARGO_PKG_VERSION"));

pub const MANIFEST_FILE: &str = "manifest.json";
pub const STAGE_REPORTS_FILE: &str = "stage_reports.json";
pub const REJECTIONS_FILE: &str = "rejections.json";

pub const STAGE_ACQUIRE: &str = "acquire";
pub const STAGE_ENUMERATE: &str = "enumerate";
pub const STAGE_PARSE: &str = "parse";
pub const STAGE_RESOLVE: &str = "resolve";
pub const STAGE_FILTER: &str = "filter";
pub const STAGE_TRANSFORM: &str = "transform";
pub const STAGE_PACKAGE: &str = "package";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StageReport {
    pub stage: String,
    pub inputs_seen: u64,
    pub accepted: u64,
    pub rejected: u64,
    pub reasons: BTreeMap<String, u64>,
}

impl StageReport {
    pub fn new(stage: &str) -> StageReport {
        StageReport {
            stage: stage.to_string(),
            inputs_seen: 0,
            accepted: 0,
            rejected: 0,
            reasons: BTreeMap::new(),
        }
    }

    fn pass(&mut self) {
        self.inputs_seen += 1;
        self.accepted += 1;
    }

    fn fail(&mut self, code: &str) {
        self.inputs_seen += 1;
        self.rejected += 1;
        *self.reasons.entry(code.to_string()).or_default() += 1;
    }
}

/// One input dropped by some stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rejection {
    /// `owner/name path` for files, `owner/name` for repositories, or
    /// `list:<line>` for repository-list rows.
    pub item: String,
    pub stage: String,
    pub code: String,
    pub detail: String,
}

/// How far a run goes. Only `Package` writes to the output root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum StopAfter {
    Filter,
    Transform,
    Package,
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot write {path}: {source}")]
    Output { path: PathBuf, source: io::Error },
}

impl From<PackageError> for PipelineError {
    fn from(e: PackageError) -> PipelineError {
        match e {
            PackageError::Io { path, source } => PipelineError::Output { path, source },
            PackageError::NotTransformed => unreachable!("only transformed outcomes are packaged"),
        }
    }
}

/// A file that passed the filter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AcceptedFile {
    pub repo: String,
    pub relative_path: String,
    pub profile: FeatureProfile,
}

#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub reports: Vec<StageReport>,
    pub rejections: Vec<Rejection>,
    pub accepted_files: Vec<AcceptedFile>,
    /// Successful transformations in processing order.
    pub transformed: Vec<(Provenance, TransformOutcome)>,
    pub artifacts: Vec<BenchmarkArtifact>,
    pub manifest: CorpusManifest,
    /// Skipped rows of the verdict map.
    pub warnings: Vec<String>,
}

impl PipelineRun {
    pub fn report(&self, stage: &str) -> Option<&StageReport> {
        self.reports.iter().find(|r| r.stage == stage)
    }
}

/// Why a single file stopped short of transformation.
struct FileRejection {
    stage: &'static str,
    code: &'static str,
    detail: String,
}

enum FileResult {
    Rejected(FileRejection),
    Filtered(FeatureProfile),
    Transformed(FeatureProfile, Box<(Provenance, TransformOutcome)>),
}

struct FileContext<'a> {
    allowlist: &'a Allowlist,
    chosen: &'a BTreeSet<PrimType>,
    criteria: &'a FilterCriteria,
    transform: TransformConfig,
    stop: StopAfter,
}

fn reject(stage: &'static str, code: &'static str, detail: impl Into<String>) -> FileResult {
    FileResult::Rejected(FileRejection {
        stage,
        code,
        detail: detail.into(),
    })
}

fn process_file(file: &SourceFile, ctx: &FileContext<'_>) -> FileResult {
    let unit = match parse_source(&file.contents) {
        Ok(u) => u,
        Err(e) => return reject(STAGE_PARSE, e.code(), e.to_string()),
    };
    let table = match build_type_table(&unit, ctx.allowlist) {
        Ok(t) => t,
        Err(e) => return reject(STAGE_RESOLVE, e.code(), e.to_string()),
    };
    let cls = classify_unit(&unit, &table);
    let profile = profile_classified(&unit, ctx.chosen, &cls);
    if !accept(&profile, ctx.criteria) {
        return reject(STAGE_FILTER, "FILTER_REJECT", format!("{profile:?}"));
    }
    if ctx.stop == StopAfter::Filter {
        return FileResult::Filtered(profile);
    }
    let prov = Provenance {
        repo: file.origin.clone(),
        original_path: file.relative_path.clone(),
        original_class: unit.class.name.clone(),
        tool_version: TOOL_VERSION.to_string(),
    };
    let outcome = transform_file(&unit, &table, &prov, &ctx.transform);
    match outcome.status.code() {
        Some(code) => {
            let detail = format!("{} removals after {} rounds", outcome.removals.len(), outcome.iterations);
            reject(STAGE_TRANSFORM, code, detail)
        }
        None => FileResult::Transformed(profile, Box::new((prov, outcome))),
    }
}

/// Parses, resolves and transforms one source text outside a batch.
/// Returns the reason code and message when the text cannot be parsed or
/// resolved.
pub fn transform_source(
    source: &str,
    allowlist: &Allowlist,
    prov: &Provenance,
    config: &TransformConfig,
) -> Result<TransformOutcome, (&'static str, String)> {
    let unit = parse_source(source).map_err(|e| (e.code(), e.to_string()))?;
    let table = build_type_table(&unit, allowlist).map_err(|e| (e.code(), e.to_string()))?;
    Ok(transform_file(&unit, &table, prov, config))
}

fn read_input(path: &Path) -> Result<String, ConfigError> {
    fs::read_to_string(path).map_err(|e| ConfigError::Read {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Runs every stage and writes benchmarks plus `manifest.json`,
/// `stage_reports.json` and `rejections.json` under the output root.
pub fn run_pipeline(config: &PipelineConfig, fetcher: &dyn Fetcher) -> Result<PipelineRun, PipelineError> {
    run_stages(config, fetcher, StopAfter::Package)
}

pub fn run_stages(config: &PipelineConfig, fetcher: &dyn Fetcher, stop: StopAfter) -> Result<PipelineRun, PipelineError> {
    let allowlist = config.load_allowlist()?;
    let repo_text = read_input(&config.repo_list_path)?;
    let mut warnings = Vec::new();
    let verdicts = match &config.verdict_map_path {
        Some(path) => {
            let (map, diags) = VerdictMap::parse(&read_input(path)?);
            warnings.extend(diags.iter().map(|d| format!("{}:{}: {}", path.display(), d.line, d.message)));
            Some(map)
        }
        None => None,
    };

    let mut rejections = Vec::new();
    let mut acquire_report = StageReport::new(STAGE_ACQUIRE);
    let (mut specs, diags) = parse_repo_list(&repo_text);
    for LineDiagnostic { line, message } in diags {
        acquire_report.fail("CSV_MALFORMED");
        rejections.push(Rejection {
            item: format!("list:{line}"),
            stage: STAGE_ACQUIRE.into(),
            code: "CSV_MALFORMED".into(),
            detail: message,
        });
    }
    // stable sort keeps the first listing of a repository ahead of repeats
    specs.sort_by(|a, b| (&a.owner, &a.name).cmp(&(&b.owner, &b.name)));
    let mut seen = BTreeSet::new();
    let mut repos = Vec::new();
    for spec in specs {
        if !seen.insert((spec.owner.clone(), spec.name.clone())) {
            acquire_report.fail("REPO_DUPLICATE");
            rejections.push(Rejection {
                item: spec.to_string(),
                stage: STAGE_ACQUIRE.into(),
                code: "REPO_DUPLICATE".into(),
                detail: "listed more than once".into(),
            });
            continue;
        }
        match acquire(&spec, &config.corpus_root, config.offline_mode, fetcher) {
            Ok(repo) => {
                acquire_report.pass();
                repos.push(repo);
            }
            Err(e) => {
                acquire_report.fail(e.code());
                rejections.push(Rejection {
                    item: spec.to_string(),
                    stage: STAGE_ACQUIRE.into(),
                    code: e.code().into(),
                    detail: e.to_string(),
                });
            }
        }
    }

    let mut enumerate_report = StageReport::new(STAGE_ENUMERATE);
    let mut files = Vec::new();
    for repo in &repos {
        let (found, skipped) = enumerate_sources(repo, config.max_files_per_repo);
        let mut skipped = skipped.into_iter().peekable();
        let mut found = found.into_iter().peekable();
        // merge so rejections stay in path order
        loop {
            let take_skip = match (found.peek(), skipped.peek()) {
                (None, None) => break,
                (Some(_), None) => false,
                (None, Some(_)) => true,
                (Some(f), Some(s)) => s.relative_path < f.relative_path,
            };
            if take_skip {
                let s = skipped.next().expect("peeked");
                enumerate_report.fail(s.code);
                rejections.push(Rejection {
                    item: format!("{} {}", repo.spec, s.relative_path),
                    stage: STAGE_ENUMERATE.into(),
                    code: s.code.into(),
                    detail: s.message,
                });
            } else {
                enumerate_report.pass();
                files.push(found.next().expect("peeked"));
            }
        }
    }

    let ctx = FileContext {
        allowlist: &allowlist,
        chosen: &config.chosen_primitive_types,
        criteria: &config.criteria,
        transform: TransformConfig {
            array_length_bound: config.array_length_bound,
        },
        stop,
    };
    let results: Vec<FileResult> = files.par_iter().map(|f| process_file(f, &ctx)).collect();

    let mut parse_report = StageReport::new(STAGE_PARSE);
    let mut resolve_report = StageReport::new(STAGE_RESOLVE);
    let mut filter_report = StageReport::new(STAGE_FILTER);
    let mut transform_report = StageReport::new(STAGE_TRANSFORM);
    let mut accepted_files = Vec::new();
    let mut transformed = Vec::new();
    for (file, result) in files.iter().zip(results) {
        let reached_filter = |profile: FeatureProfile| AcceptedFile {
            repo: file.origin.to_string(),
            relative_path: file.relative_path.clone(),
            profile,
        };
        match result {
            FileResult::Rejected(r) => {
                let order = [STAGE_PARSE, STAGE_RESOLVE, STAGE_FILTER, STAGE_TRANSFORM];
                for (stage, report) in order.iter().zip([
                    &mut parse_report,
                    &mut resolve_report,
                    &mut filter_report,
                    &mut transform_report,
                ]) {
                    if *stage == r.stage {
                        report.fail(r.code);
                        break;
                    }
                    report.pass();
                }
                rejections.push(Rejection {
                    item: format!("{} {}", file.origin, file.relative_path),
                    stage: r.stage.into(),
                    code: r.code.into(),
                    detail: r.detail,
                });
            }
            FileResult::Filtered(profile) => {
                parse_report.pass();
                resolve_report.pass();
                filter_report.pass();
                accepted_files.push(reached_filter(profile));
            }
            FileResult::Transformed(profile, pair) => {
                parse_report.pass();
                resolve_report.pass();
                filter_report.pass();
                transform_report.pass();
                accepted_files.push(reached_filter(profile));
                transformed.push(*pair);
            }
        }
    }

    let mut reports = vec![acquire_report, enumerate_report, parse_report, resolve_report, filter_report];
    if stop >= StopAfter::Transform {
        reports.push(transform_report);
    }
    let mut artifacts = Vec::new();
    if stop == StopAfter::Package {
        let mut package_report = StageReport::new(STAGE_PACKAGE);
        let mut packager = Packager::new(&config.output_root, &config.properties);
        create_dir(&config.output_root)?;
        for (prov, outcome) in &transformed {
            artifacts.push(packager.emit_benchmark(outcome, prov, verdicts.as_ref())?);
            package_report.pass();
        }
        reports.push(package_report);
    }
    let manifest = corpus_manifest(&artifacts);
    let run = PipelineRun {
        reports,
        rejections,
        accepted_files,
        transformed,
        artifacts,
        manifest,
        warnings,
    };
    if stop == StopAfter::Package {
        write_json(&config.output_root.join(MANIFEST_FILE), &run.manifest.to_json())?;
        write_json(&config.output_root.join(STAGE_REPORTS_FILE), &run.reports)?;
        write_json(&config.output_root.join(REJECTIONS_FILE), &run.rejections)?;
    }
    Ok(run)
}

fn create_dir(path: &Path) -> Result<(), PipelineError> {
    fs::create_dir_all(path).map_err(|source| PipelineError::Output {
        path: path.to_path_buf(),
        source,
    })
}

fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), PipelineError> {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    fs::write(path, text).map_err(|source| PipelineError::Output {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acquire::RepoSpec;

    struct NoNetwork;

    impl Fetcher for NoNetwork {
        fn fetch(&self, _: &RepoSpec, _: &Path) -> Result<(), String> {
            Err("network disabled".into())
        }
    }

    fn config(dir: &Path, repos: &str) -> PipelineConfig {
        fs::write(dir.join("repos.csv"), repos).unwrap();
        let text = "repo_list_path = \"repos.csv\"\ncorpus_root = \"corpus\"\noutput_root = \"out\"\noffline_mode = true\n";
        PipelineConfig::from_toml(text, dir).unwrap()
    }

    #[test]
    fn empty_repo_list_is_a_vacuous_batch() {
        let dir = tempfile::tempdir().unwrap();
        let run = run_pipeline(&config(dir.path(), "# nothing\n"), &NoNetwork).unwrap();
        assert!(run.artifacts.is_empty());
        assert_eq!(run.reports.len(), 7);
        assert!(run.reports.iter().all(|r| r.inputs_seen == 0));
        assert!(dir.path().join("out").join(MANIFEST_FILE).is_file());
    }

    #[test]
    fn missing_mirrors_and_bad_rows_are_rejections() {
        let dir = tempfile::tempdir().unwrap();
        let run = run_pipeline(&config(dir.path(), "a/b\nbroken\na/b\n"), &NoNetwork).unwrap();
        let acq = run.report(STAGE_ACQUIRE).unwrap();
        assert_eq!((acq.inputs_seen, acq.accepted, acq.rejected), (3, 0, 3));
        let codes: Vec<_> = acq.reasons.iter().map(|(k, v)| (k.as_str(), *v)).collect();
        assert_eq!(codes, vec![("ACQUIRE_MISSING", 1), ("CSV_MALFORMED", 1), ("REPO_DUPLICATE", 1)]);
    }

    #[test]
    fn files_flow_through_every_stage() {
        let dir = tempfile::tempdir().unwrap();
        let repo = dir.path().join("corpus/acme/demo");
        fs::create_dir_all(&repo).unwrap();
        fs::write(
            repo.join("Good.java"),
            "class Good { int f(int x) { if (x > 0) { return 1; } return 0; } }\n",
        )
        .unwrap();
        fs::write(repo.join("Flat.java"), "class Flat { int f(int x) { return x; } }\n").unwrap();
        fs::write(repo.join("Bad.java"), "class Bad { int f( }\n").unwrap();
        let mut cfg = config(dir.path(), "acme/demo\n");
        cfg.criteria.min_if = 1;
        let run = run_pipeline(&cfg, &NoNetwork).unwrap();
        for r in &run.reports {
            assert_eq!(r.accepted + r.rejected, r.inputs_seen, "{}", r.stage);
        }
        assert_eq!(run.report(STAGE_PARSE).unwrap().reasons.get("PARSE_FAIL"), Some(&1));
        assert_eq!(run.report(STAGE_FILTER).unwrap().reasons.get("FILTER_REJECT"), Some(&1));
        assert_eq!(run.artifacts.len(), 1);
        assert_eq!(run.artifacts[0].id, "acme-demo-good");
        assert!(dir.path().join("out/acme-demo-good/Main.java").is_file());
    }
}
