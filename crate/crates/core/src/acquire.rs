//! Repository list parsing, local mirrors and source enumeration.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde::{Deserialize, Serialize};

pub const SOURCE_EXTENSION: &str = "java";

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RepoSpec {
    pub owner: String,
    pub name: String,
    /// Commit or branch; empty means the default branch.
    pub revision: String,
}

impl RepoSpec {
    pub fn new(owner: &str, name: &str, revision: &str) -> RepoSpec {
        RepoSpec {
            owner: owner.to_string(),
            name: name.to_string(),
            revision: revision.to_string(),
        }
    }

    pub fn revision_or_unknown(&self) -> &str {
        if self.revision.is_empty() {
            "unknown"
        } else {
            &self.revision
        }
    }
}

impl fmt::Display for RepoSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.owner, self.name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LineDiagnostic {
    /// 1-based line number in the list file.
    pub line: usize,
    pub message: String,
}

fn valid_component(s: &str) -> bool {
    !s.is_empty() && s != "." && s != ".." && !s.contains(['/', '\\']) && !s.chars().any(char::is_whitespace)
}

/// Parses `owner/name[,revision]` lines. Blank lines and lines starting with
/// `#` are skipped; malformed lines are reported and skipped.
pub fn parse_repo_list(text: &str) -> (Vec<RepoSpec>, Vec<LineDiagnostic>) {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut specs = Vec::new();
    let mut diags = Vec::new();
    for record in reader.records() {
        let record = match record {
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
        let line = record.position().map_or(0, |p| p.line() as usize);
        let (repo, revision) = match record.len() {
            1 => (&record[0], ""),
            2 => (&record[0], &record[1]),
            n => {
                diags.push(LineDiagnostic {
                    line,
                    message: format!("expected 1 or 2 columns, found {n}"),
                });
                continue;
            }
        };
        match repo.split_once('/') {
            Some((owner, name)) if valid_component(owner) && valid_component(name) => {
                specs.push(RepoSpec::new(owner, name, revision));
            }
            _ => diags.push(LineDiagnostic {
                line,
                message: format!("`{repo}` is not of the form owner/name"),
            }),
        }
    }
    (specs, diags)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalRepo {
    pub spec: RepoSpec,
    pub root: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AcquireError {
    #[error("no local mirror at {0}")]
    Missing(PathBuf),
    #[error("fetching {0} failed: {1}")]
    Fetch(String, String),
}

impl AcquireError {
    pub fn code(&self) -> &'static str {
        match self {
            AcquireError::Missing(_) => "ACQUIRE_MISSING",
            AcquireError::Fetch(..) => "ACQUIRE_FAIL",
        }
    }
}

/// Network access for acquisition; only consulted on a cache miss.
pub trait Fetcher: Sync {
    fn fetch(&self, spec: &RepoSpec, dest: &Path) -> Result<(), String>;
}

/// Clones from GitHub with the `git` command line.
#[derive(Debug, Clone, Default)]
pub struct GitFetcher;

impl Fetcher for GitFetcher {
    fn fetch(&self, spec: &RepoSpec, dest: &Path) -> Result<(), String> {
        let url = format!("https://github.com/{}/{}.git", spec.owner, spec.name);
        let run = |cmd: &mut Command| -> Result<(), String> {
            let out = cmd.output().map_err(|e| e.to_string())?;
            if out.status.success() {
                Ok(())
            } else {
                Err(String::from_utf8_lossy(&out.stderr).trim().to_string())
            }
        };
        run(Command::new("git").args(["clone", "--quiet", &url]).arg(dest))?;
        if !spec.revision.is_empty() {
            run(Command::new("git")
                .arg("-C")
                .arg(dest)
                .args(["checkout", "--quiet", &spec.revision]))?;
        }
        Ok(())
    }
}

pub fn mirror_path(spec: &RepoSpec, corpus_root: &Path) -> PathBuf {
    corpus_root.join(&spec.owner).join(&spec.name)
}

/// Returns the mirror for `spec`, fetching it first when online and absent.
/// An existing mirror is never refetched.
pub fn acquire(
    spec: &RepoSpec,
    corpus_root: &Path,
    offline: bool,
    fetcher: &dyn Fetcher,
) -> Result<LocalRepo, AcquireError> {
    let root = mirror_path(spec, corpus_root);
    if root.is_dir() {
        return Ok(LocalRepo {
            spec: spec.clone(),
            root,
        });
    }
    if offline {
        return Err(AcquireError::Missing(root));
    }
    let fail = |msg: String| AcquireError::Fetch(spec.to_string(), msg);
    let parent = root.parent().expect("mirror path has an owner directory");
    fs::create_dir_all(parent).map_err(|e| fail(e.to_string()))?;
    // clone beside the final location so a failed fetch never leaves a
    // half-populated mirror behind
    let staging = parent.join(format!(".{}.partial", spec.name));
    if staging.exists() {
        fs::remove_dir_all(&staging).map_err(|e| fail(e.to_string()))?;
    }
    if let Err(msg) = fetcher.fetch(spec, &staging) {
        let _ = fs::remove_dir_all(&staging);
        return Err(fail(msg));
    }
    fs::rename(&staging, &root).map_err(|e| fail(e.to_string()))?;
    Ok(LocalRepo {
        spec: spec.clone(),
        root,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceFile {
    pub origin: RepoSpec,
    /// `/`-separated path relative to the repository root.
    pub relative_path: String,
    pub contents: String,
    pub line_count: usize,
}

impl SourceFile {
    /// File name without directory or extension.
    pub fn stem(&self) -> &str {
        let file = self.relative_path.rsplit('/').next().unwrap_or(&self.relative_path);
        file.strip_suffix(&format!(".{SOURCE_EXTENSION}")).unwrap_or(file)
    }
}

/// Newline-terminated lines, plus one for an unterminated last line.
pub fn line_count(text: &str) -> usize {
    let newlines = text.bytes().filter(|&b| b == b'\n').count();
    if text.is_empty() || text.ends_with('\n') {
        newlines
    } else {
        newlines + 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkippedFile {
    pub relative_path: String,
    /// `READ_FAIL` or `DECODE_FAIL`.
    pub code: &'static str,
    pub message: String,
}

/// Source files under the mirror in lexicographic path order, skipping
/// version-control metadata. Files that are not valid UTF-8 or cannot be
/// read are skipped and reported; `max_files` (0 = no limit) caps the
/// decoded files returned.
pub fn enumerate_sources(repo: &LocalRepo, max_files: usize) -> (Vec<SourceFile>, Vec<SkippedFile>) {
    let mut paths: Vec<(String, PathBuf)> = walkdir::WalkDir::new(&repo.root)
        .into_iter()
        .filter_entry(|e| e.depth() == 0 || e.file_name() != ".git")
        .filter_map(Result::ok)
        .filter(|e| e.file_type().is_file())
        .filter(|e| e.path().extension().is_some_and(|x| x == SOURCE_EXTENSION))
        .filter_map(|e| {
            let rel = e.path().strip_prefix(&repo.root).ok()?;
            let rel = rel
                .components()
                .map(|c| c.as_os_str().to_string_lossy().into_owned())
                .collect::<Vec<_>>()
                .join("/");
            Some((rel, e.into_path()))
        })
        .collect();
    paths.sort();
    let mut files = Vec::new();
    let mut skipped = Vec::new();
    for (rel, path) in paths {
        if max_files != 0 && files.len() == max_files {
            break;
        }
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) => {
                skipped.push(SkippedFile {
                    relative_path: rel,
                    code: "READ_FAIL",
                    message: e.to_string(),
                });
                continue;
            }
        };
        match String::from_utf8(bytes) {
            Ok(contents) => files.push(SourceFile {
                origin: repo.spec.clone(),
                line_count: line_count(&contents),
                relative_path: rel,
                contents,
            }),
            Err(e) => skipped.push(SkippedFile {
                relative_path: rel,
                code: "DECODE_FAIL",
                message: format!("not valid UTF-8: {e}"),
            }),
        }
    }
    (files, skipped)
}
