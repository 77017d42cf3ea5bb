use std::path::PathBuf;

use regel_core::nlp::{GrammarError, ModelError, TrainError};
use regel_core::regex::ParseError;
use regel_core::synthesis::ExampleError;
use thiserror::Error;

/// Everything that makes a command exit with status 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{what} {text:?}: {source}\n  {text}\n  {caret:>width$}", caret = "^", width = source.position() + 1)]
    Syntax {
        what: &'static str,
        text: String,
        #[source]
        source: ParseError,
    },
    #[error(transparent)]
    Examples(#[from] ExampleError),
    #[error("{}: {msg}", path.display())]
    Benchmark { path: PathBuf, msg: String },
    #[error("grammar: {0}")]
    Grammar(#[from] GrammarError),
    #[error("model: {0}")]
    Model(#[from] ModelError),
    #[error(transparent)]
    Train(#[from] TrainError),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> CliError {
        CliError::Io { path: path.into(), source }
    }
}

pub fn read_file(path: &std::path::Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn regex(text: &str) -> Result<regel_core::regex::Regex, CliError> {
    regel_core::regex::parse_regex(text).map_err(|source| CliError::Syntax { what: "regex", text: text.into(), source })
}

pub fn sketch(text: &str) -> Result<regel_core::sketch::HSketch, CliError> {
    regel_core::sketch::parse_sketch(text).map_err(|source| CliError::Syntax { what: "sketch", text: text.into(), source })
}
