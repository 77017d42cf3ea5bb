//! Benchmark files: one JSON document each.

use std::path::{Path, PathBuf};

use regel_core::regex::Regex;
use regel_core::sketch::HSketch;
use regel_core::synthesis::Examples;
use serde::{Deserialize, Serialize};

use crate::error::{self, CliError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Benchmark {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub positives: Vec<String>,
    pub negatives: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_truth: Option<String>,
    /// Sketches that bypass the parser.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sketches: Option<Vec<String>>,
}

/// A benchmark with its texts parsed.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub bench: Benchmark,
    pub path: PathBuf,
    pub examples: Examples,
    pub ground_truth: Option<Regex>,
    pub sketches: Option<Vec<HSketch>>,
}

impl Loaded {
    pub fn new(bench: Benchmark, path: PathBuf) -> Result<Loaded, CliError> {
        let bad = |msg: String| CliError::Benchmark { path: path.clone(), msg };
        if bench.description.is_none() && bench.sketches.is_none() {
            return Err(bad("needs a description or sketches".into()));
        }
        let examples = Examples::new(bench.positives.clone(), bench.negatives.clone()).map_err(|e| bad(e.to_string()))?;
        let ground_truth = match &bench.ground_truth {
            Some(t) => Some(error::regex(t).map_err(|e| bad(e.to_string()))?),
            None => None,
        };
        let sketches = match &bench.sketches {
            Some(list) => Some(list.iter().map(|t| error::sketch(t)).collect::<Result<Vec<_>, _>>().map_err(|e| bad(e.to_string()))?),
            None => None,
        };
        Ok(Loaded { bench, path, examples, ground_truth, sketches })
    }

    pub fn id(&self) -> &str {
        &self.bench.id
    }
}

pub fn load(path: &Path) -> Result<Loaded, CliError> {
    let text = error::read_file(path)?;
    let bench: Benchmark = serde_json::from_str(&text).map_err(|source| CliError::Json { path: path.into(), source })?;
    Loaded::new(bench, path.into())
}

/// Every `*.json` file of `dir`, in file name order.
pub fn load_dir(dir: &Path) -> Result<Vec<Loaded>, CliError> {
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| CliError::io(dir, e))? {
        let path = entry.map_err(|e| CliError::io(dir, e))?.path();
        if path.extension().is_some_and(|e| e == "json") {
            files.push(path);
        }
    }
    files.sort();
    files.iter().map(|f| load(f)).collect()
}

/// Positive and negative examples as a JSON document.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ExampleFile {
    #[serde(default)]
    pub positives: Vec<String>,
    #[serde(default)]
    pub negatives: Vec<String>,
}
