#![allow(dead_code)]

pub mod checks;
pub mod oracle;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use argforge::acquire::{Fetcher, RepoSpec};
use argforge::config::PipelineConfig;
use argforge::syntax::{parse_source, CompilationUnit};

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("fixtures")
}

pub fn golden(name: &str) -> String {
    fs::read_to_string(fixtures().join("golden").join(name)).unwrap_or_else(|e| panic!("golden {name}: {e}"))
}

/// A corpus file that decodes as text, keyed by `owner/name relative/path`.
pub struct Fixture {
    pub label: String,
    pub repo: RepoSpec,
    pub relative_path: String,
    pub text: String,
}

/// Every decodable source file of the mini-corpus, in path order.
pub fn corpus_files() -> Vec<Fixture> {
    let root = fixtures().join("corpus");
    let mut out = Vec::new();
    for entry in walkdir::WalkDir::new(&root).sort_by_file_name() {
        let entry = entry.unwrap();
        if entry.path().extension().is_none_or(|x| x != "java") {
            continue;
        }
        let rel: Vec<String> = entry
            .path()
            .strip_prefix(&root)
            .unwrap()
            .components()
            .map(|c| c.as_os_str().to_string_lossy().into_owned())
            .collect();
        let Ok(text) = fs::read_to_string(entry.path()) else {
            continue;
        };
        let repo = RepoSpec::new(&rel[0], &rel[1], "");
        let relative_path = rel[2..].join("/");
        out.push(Fixture {
            label: format!("{repo} {relative_path}"),
            repo,
            relative_path,
            text,
        });
    }
    out
}

/// Corpus files that parse, with their trees.
pub fn parsed_corpus() -> Vec<(Fixture, CompilationUnit)> {
    corpus_files()
        .into_iter()
        .filter_map(|f| parse_source(&f.text).ok().map(|u| (f, u)))
        .collect()
}

/// The shipped fixture configuration with its output redirected.
pub fn fixture_config(out: &Path) -> PipelineConfig {
    let mut c = PipelineConfig::load(&fixtures().join("pipeline.toml")).expect("fixture config loads");
    c.output_root = out.to_path_buf();
    c
}

/// Fails every fetch and counts the attempts.
#[derive(Default)]
pub struct CountingFetcher {
    pub calls: AtomicUsize,
}

impl CountingFetcher {
    pub fn count(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl Fetcher for CountingFetcher {
    fn fetch(&self, spec: &RepoSpec, _dest: &Path) -> Result<(), String> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        Err(format!("no network for {spec}"))
    }
}

/// Every file under `root` keyed by `/`-separated relative path.
pub fn snapshot(root: &Path) -> BTreeMap<String, Vec<u8>> {
    walkdir::WalkDir::new(root)
        .into_iter()
        .map(Result::unwrap)
        .filter(|e| e.file_type().is_file())
        .map(|e| {
            let rel = e
                .path()
                .strip_prefix(root)
                .unwrap()
                .components()
                .map(|c| c.as_os_str().to_string_lossy().into_owned())
                .collect::<Vec<_>>()
                .join("/");
            (rel, fs::read(e.path()).unwrap())
        })
        .collect()
}

/// Body text without the leading `//` header lines.
pub fn strip_header(text: &str) -> &str {
    let mut rest = text;
    while rest.starts_with("//") {
        rest = rest.split_once('\n').map_or("", |(_, r)| r);
    }
    rest
}
