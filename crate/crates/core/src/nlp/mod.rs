//! Natural-language front end: a grammar-based semantic parser that maps an
//! English description to ranked h-sketches, with a log-linear scorer.

mod grammar;
mod model;
mod parser;
mod tokens;

pub use grammar::{Grammar, GrammarError, Rule, RuleKind, SemExpr, SemFn, Symbol, Value, DEMO_GRAMMAR, ROOT};
pub use model::{train, Model, ModelError, TrainConfig, TrainError, TrainReport};
pub use parser::{
    extract_features, parse, parse_tokens, rule_feature, span_feature, Candidate, Derivation, Features, ParseConfig,
    DEFAULT_BEAM, DEFAULT_LIMIT, FORWARDED,
};
pub use tokens::{tokenize, Token};
