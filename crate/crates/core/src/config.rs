//! Pipeline configuration file.
//!
//! ```toml
//! repo_list_path = "repos.csv"
//! corpus_root = "corpus"
//! output_root = "out"
//! chosen_primitive_types = ["int", "double"]
//! offline_mode = true
//!
//! [criteria]
//! minIfOnChosenPrimitive = 1
//! ```
//!
//! Relative paths are taken relative to the directory holding the file.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::filter::FilterCriteria;
use crate::property::Property;
use crate::resolve::{Allowlist, AllowlistError};
use crate::syntax::ast::PrimType;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {message}")]
    Read { path: PathBuf, message: String },
    #[error("invalid configuration {path}: {message}")]
    Syntax { path: PathBuf, message: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("allowlist {path}: {source}")]
    Allowlist { path: PathBuf, source: AllowlistError },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    repo_list_path: PathBuf,
    corpus_root: PathBuf,
    output_root: PathBuf,
    #[serde(default)]
    criteria: FilterCriteria,
    #[serde(default = "default_chosen")]
    chosen_primitive_types: Vec<String>,
    allowlist_path: Option<PathBuf>,
    #[serde(default)]
    offline_mode: bool,
    #[serde(default)]
    max_files_per_repo: usize,
    #[serde(default = "default_bound")]
    array_length_bound: u32,
    verdict_map_path: Option<PathBuf>,
    #[serde(default = "default_properties")]
    properties: Vec<String>,
}

fn default_chosen() -> Vec<String> {
    vec!["int".into(), "double".into()]
}

fn default_bound() -> u32 {
    16
}

fn default_properties() -> Vec<String> {
    Property::ALL.iter().map(|p| p.name().to_string()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineConfig {
    pub repo_list_path: PathBuf,
    pub corpus_root: PathBuf,
    pub output_root: PathBuf,
    pub criteria: FilterCriteria,
    pub chosen_primitive_types: BTreeSet<PrimType>,
    /// `None` uses the built-in library allowlist.
    pub allowlist_path: Option<PathBuf>,
    pub offline_mode: bool,
    /// 0 = unlimited.
    pub max_files_per_repo: usize,
    pub array_length_bound: u32,
    pub verdict_map_path: Option<PathBuf>,
    /// Properties listed in every task definition, in order.
    pub properties: Vec<Property>,
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<PipelineConfig, ConfigError> {
        let text = fs::read_to_string(path).map_err(|e| ConfigError::Read {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        PipelineConfig::from_toml(&text, base).map_err(|e| match e {
            ConfigError::Syntax { message, .. } => ConfigError::Syntax {
                path: path.to_path_buf(),
                message,
            },
            other => other,
        })
    }

    /// Parses configuration text, resolving relative paths against `base`.
    pub fn from_toml(text: &str, base: &Path) -> Result<PipelineConfig, ConfigError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Syntax {
            path: PathBuf::new(),
            message: e.to_string(),
        })?;
        let abs = |p: PathBuf| if p.is_absolute() { p } else { base.join(p) };
        let mut chosen = BTreeSet::new();
        for name in &raw.chosen_primitive_types {
            let p = PrimType::from_keyword(name)
                .ok_or_else(|| ConfigError::Invalid(format!("`{name}` is not a primitive type")))?;
            chosen.insert(p);
        }
        if raw.array_length_bound < 1 {
            return Err(ConfigError::Invalid("array_length_bound must be at least 1".into()));
        }
        let mut properties = Vec::new();
        for name in &raw.properties {
            let p: Property = name.parse().map_err(|e| ConfigError::Invalid(format!("{e}")))?;
            if !properties.contains(&p) {
                properties.push(p);
            }
        }
        if properties.is_empty() {
            return Err(ConfigError::Invalid("at least one property is required".into()));
        }
        Ok(PipelineConfig {
            repo_list_path: abs(raw.repo_list_path),
            corpus_root: abs(raw.corpus_root),
            output_root: abs(raw.output_root),
            criteria: raw.criteria,
            chosen_primitive_types: chosen,
            allowlist_path: raw.allowlist_path.map(abs),
            offline_mode: raw.offline_mode,
            max_files_per_repo: raw.max_files_per_repo,
            array_length_bound: raw.array_length_bound,
            verdict_map_path: raw.verdict_map_path.map(abs),
            properties,
        })
    }

    pub fn load_allowlist(&self) -> Result<Allowlist, ConfigError> {
        match &self.allowlist_path {
            None => Ok(Allowlist::jdk_default()),
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| ConfigError::Read {
                    path: path.clone(),
                    message: e.to_string(),
                })?;
                Allowlist::parse(&text).map_err(|source| ConfigError::Allowlist {
                    path: path.clone(),
                    source,
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "repo_list_path = \"repos.csv\"\ncorpus_root = \"/abs/corpus\"\noutput_root = \"out\"\n";

    #[test]
    fn defaults_and_relative_paths() {
        let c = PipelineConfig::from_toml(MINIMAL, Path::new("/cfg")).unwrap();
        assert_eq!(c.repo_list_path, PathBuf::from("/cfg/repos.csv"));
        assert_eq!(c.corpus_root, PathBuf::from("/abs/corpus"));
        assert_eq!(c.array_length_bound, 16);
        assert_eq!(c.criteria, FilterCriteria::default());
        assert_eq!(c.properties, Property::ALL.to_vec());
        assert_eq!(c.chosen_primitive_types, [PrimType::Int, PrimType::Double].into_iter().collect());
    }

    #[test]
    fn criteria_keys() {
        let text = format!("{MINIMAL}[criteria]\nminIfStmt = 2\nminIfOnChosenPrimitive = 1\nminTypeExpr = 3\nminTypeParams = 0\n");
        let c = PipelineConfig::from_toml(&text, Path::new("/")).unwrap();
        assert_eq!((c.criteria.min_if, c.criteria.min_if_on_chosen_primitive, c.criteria.min_type_expressions), (2, 1, 3));
    }

    #[test]
    fn invalid_values_are_configuration_errors() {
        for extra in [
            "chosen_primitive_types = [\"string\"]\n",
            "array_length_bound = 0\n",
            "properties = [\"Termination\"]\n",
            "[criteria]\nminIfs = 1\n",
            "unknown_key = 1\n",
        ] {
            let text = format!("{MINIMAL}{extra}");
            assert!(PipelineConfig::from_toml(&text, Path::new("/")).is_err(), "{extra}");
        }
    }
}
