//! Benchmark directories, task definitions and corpus statistics.
//!
//! Each accepted unit becomes `<slug>/` holding `Main.java`, `<slug>.yml`
//! and a copy of the `Verifier` stub so the directory compiles on its own.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use num_rational::Ratio;
use serde::Serialize;

use crate::acquire::LineDiagnostic;
use crate::metrics::format_decimal;
use crate::property::{parse_bool, Property};
use crate::syntax::{loc_count, pretty_print};
use crate::transform::{Provenance, TransformOutcome, TransformStatus};

pub const SOURCE_FILE: &str = "Main.java";
pub const VERIFIER_FILE: &str = "Verifier.java";
pub const VERIFIER_STUB: &str = include_str!("../data/Verifier.java");

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BenchmarkArtifact {
    pub id: String,
    pub source: String,
    pub task_definition: String,
    /// Expected verdict per property; `None` is unspecified.
    pub properties: Vec<(Property, Option<bool>)>,
    pub origin: String,
    pub loc: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum PackageError {
    #[error("only transformed units can be packaged")]
    NotTransformed,
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

/// User-supplied expected verdicts keyed by slug and property.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerdictMap {
    entries: BTreeMap<(String, Property), bool>,
}

impl VerdictMap {
    /// Parses `slug,property,verdict` rows; a leading header row with those
    /// names is optional. Bad rows are reported and skipped.
    pub fn parse(text: &str) -> (VerdictMap, Vec<LineDiagnostic>) {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut map = VerdictMap::default();
        let mut diags = Vec::new();
        for (idx, row) in reader.records().enumerate() {
            let row = match row {
                Ok(r) => r,
                Err(e) => {
                    let line = e.position().map_or(0, |p| p.line() as usize);
                    diags.push(LineDiagnostic {
                        line,
                        message: e.to_string(),
                    });
                    continue;
                }
            };
            let line = row.position().map_or(0, |p| p.line() as usize);
            let fields: Vec<&str> = row.iter().collect();
            if idx == 0 && fields == ["slug", "property", "verdict"] {
                continue;
            }
            let parsed = match fields.as_slice() {
                [slug, prop, verdict] => prop
                    .parse::<Property>()
                    .ok()
                    .zip(parse_bool(verdict))
                    .map(|(p, v)| (slug.to_string(), p, v)),
                _ => None,
            };
            match parsed {
                Some((slug, p, v)) => {
                    map.entries.insert((slug, p), v);
                }
                None => diags.push(LineDiagnostic {
                    line,
                    message: format!("expected `slug,property,true|false`, found `{}`", fields.join(",")),
                }),
            }
        }
        (map, diags)
    }

    pub fn insert(&mut self, slug: &str, property: Property, verdict: bool) {
        self.entries.insert((slug.to_string(), property), verdict);
    }

    pub fn get(&self, slug: &str, property: Property) -> Option<bool> {
        self.entries.get(&(slug.to_string(), property)).copied()
    }
}

/// `<owner>-<name>-<stem>`, lowercased, with every run of characters
/// outside `[a-z0-9]` collapsed to one `-`.
pub fn slug_base(owner: &str, name: &str, stem: &str) -> String {
    let raw = format!("{owner}-{name}-{stem}").to_lowercase();
    let mut out = String::with_capacity(raw.len());
    for c in raw.chars() {
        if c.is_ascii_lowercase() || c.is_ascii_digit() {
            out.push(c);
        } else if !out.ends_with('-') {
            out.push('-');
        }
    }
    let trimmed = out.trim_matches('-');
    if trimmed.is_empty() {
        "benchmark".to_string()
    } else {
        trimmed.to_string()
    }
}

pub fn emit_task_definition(properties: &[(Property, Option<bool>)], origin: &str) -> String {
    let mut y = String::from("format_version: \"1.0\"\n");
    y.push_str(&format!("input_files: '{SOURCE_FILE}'\n"));
    y.push_str("properties:\n");
    for (p, verdict) in properties {
        y.push_str(&format!("  - property_file: {}\n", p.property_file()));
        if let Some(v) = verdict {
            y.push_str(&format!("    expected_verdict: {v}\n"));
        }
    }
    y.push_str(&format!("origin: {origin}\n"));
    y
}

fn file_stem(path: &str) -> &str {
    let file = path.rsplit('/').next().unwrap_or(path);
    file.rsplit_once('.').map_or(file, |(stem, _)| stem)
}

fn write(path: &Path, contents: &str) -> Result<(), PackageError> {
    fs::write(path, contents).map_err(|source| PackageError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes benchmark directories under one output root, keeping slugs
/// unique across everything it emits.
#[derive(Debug)]
pub struct Packager {
    root: PathBuf,
    properties: Vec<Property>,
    used: BTreeSet<String>,
}

impl Packager {
    pub fn new(root: &Path, properties: &[Property]) -> Packager {
        Packager {
            root: root.to_path_buf(),
            properties: properties.to_vec(),
            used: BTreeSet::new(),
        }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// `base`, or `base-2`, `base-3`, … for repeats.
    fn claim_slug(&mut self, base: &str) -> String {
        let mut slug = base.to_string();
        let mut k = 2;
        while self.used.contains(&slug) {
            slug = format!("{base}-{k}");
            k += 1;
        }
        self.used.insert(slug.clone());
        slug
    }

    pub fn emit_benchmark(
        &mut self,
        outcome: &TransformOutcome,
        prov: &Provenance,
        verdicts: Option<&VerdictMap>,
    ) -> Result<BenchmarkArtifact, PackageError> {
        let unit = match (&outcome.status, &outcome.unit) {
            (TransformStatus::Transformed, Some(u)) => u,
            _ => return Err(PackageError::NotTransformed),
        };
        let base = slug_base(&prov.repo.owner, &prov.repo.name, file_stem(&prov.original_path));
        let id = self.claim_slug(&base);
        let properties: Vec<(Property, Option<bool>)> = self
            .properties
            .iter()
            .map(|p| (*p, verdicts.and_then(|v| v.get(&id, *p))))
            .collect();
        let origin = prov.origin();
        let source = pretty_print(unit);
        let artifact = BenchmarkArtifact {
            task_definition: emit_task_definition(&properties, &origin),
            loc: loc_count(&source),
            id,
            source,
            properties,
            origin,
        };
        let dir = self.root.join(&artifact.id);
        fs::create_dir_all(&dir).map_err(|source| PackageError::Io {
            path: dir.clone(),
            source,
        })?;
        write(&dir.join(SOURCE_FILE), &artifact.source)?;
        write(&dir.join(format!("{}.yml", artifact.id)), &artifact.task_definition)?;
        write(&dir.join(VERIFIER_FILE), VERIFIER_STUB)?;
        Ok(artifact)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct PropertyCounts {
    pub benchmarks: u64,
    pub expected_true: u64,
    pub expected_false: u64,
    pub unspecified: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorpusManifest {
    pub per_property: BTreeMap<Property, PropertyCounts>,
    pub benchmarks: u64,
    pub total_property_runs: u64,
    pub total_loc: u64,
}

impl CorpusManifest {
    /// Mean LOC per benchmark; zero for an empty corpus.
    pub fn average_loc(&self) -> Ratio<u64> {
        if self.benchmarks == 0 {
            Ratio::from_integer(0)
        } else {
            Ratio::new(self.total_loc, self.benchmarks)
        }
    }

    /// Average LOC to one decimal, half-up.
    pub fn average_loc_display(&self) -> String {
        format_decimal(self.average_loc(), 1)
    }

    pub fn counts(&self, p: Property) -> PropertyCounts {
        self.per_property.get(&p).copied().unwrap_or_default()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let per: serde_json::Map<String, serde_json::Value> = Property::ALL
            .iter()
            .map(|p| (p.name().to_string(), serde_json::to_value(self.counts(*p)).expect("plain counts")))
            .collect();
        serde_json::json!({
            "benchmarks": self.benchmarks,
            "per_property": per,
            "total_property_runs": self.total_property_runs,
            "total_loc": self.total_loc,
            "average_loc": self.average_loc_display(),
        })
    }
}

pub fn corpus_manifest(artifacts: &[BenchmarkArtifact]) -> CorpusManifest {
    let mut m = CorpusManifest {
        benchmarks: artifacts.len() as u64,
        ..CorpusManifest::default()
    };
    for a in artifacts {
        m.total_loc += a.loc as u64;
        for (p, verdict) in &a.properties {
            let c = m.per_property.entry(*p).or_default();
            c.benchmarks += 1;
            match verdict {
                Some(true) => c.expected_true += 1,
                Some(false) => c.expected_false += 1,
                None => c.unspecified += 1,
            }
            m.total_property_runs += 1;
        }
    }
    m
}
