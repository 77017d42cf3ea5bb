use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use super::grammar::{Grammar, Rule, Symbol, Value, ROOT};
use super::model::Model;
use super::tokens::{tokenize, Token};
use crate::sketch::HSketch;

/// Sparse feature vector: feature id to count.
pub type Features = BTreeMap<String, f64>;

pub const DEFAULT_BEAM: usize = 500;
pub const DEFAULT_LIMIT: usize = 500;
/// How many ranked sketches the end-to-end pipeline hands to synthesis.
pub const FORWARDED: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParseConfig {
    /// Derivations kept per (span, category).
    pub beam: usize,
    /// Root derivations returned.
    pub limit: usize,
}

impl Default for ParseConfig {
    fn default() -> Self {
        ParseConfig { beam: DEFAULT_BEAM, limit: DEFAULT_LIMIT }
    }
}

impl ParseConfig {
    /// No pruning at all.
    pub fn unbounded() -> Self {
        ParseConfig { beam: usize::MAX, limit: usize::MAX }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Derivation {
    pub category: String,
    /// Token span `[start, end)`.
    pub start: usize,
    pub end: usize,
    pub rule: String,
    pub children: Vec<Arc<Derivation>>,
    pub value: Value,
    pub features: Features,
    pub score: f64,
    /// Construction order within one parse; breaks score ties.
    pub order: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub sketch: HSketch,
    pub score: f64,
    pub probability: f64,
    pub derivation: Arc<Derivation>,
}

pub fn span_feature(category: &str, len: usize) -> String {
    let bucket = match len {
        0 | 1 => "len1",
        2 => "len2",
        3 => "len3",
        _ => "len4+",
    };
    format!("span:{category}:{bucket}")
}

pub fn rule_feature(rule: &str) -> String {
    format!("rule:{rule}")
}

/// Rule firings and span-length buckets over the whole derivation tree.
pub fn extract_features(d: &Derivation) -> Features {
    let mut out = Features::new();
    fn go(d: &Derivation, out: &mut Features) {
        *out.entry(rule_feature(&d.rule)).or_default() += 1.0;
        *out.entry(span_feature(&d.category, d.end - d.start)).or_default() += 1.0;
        d.children.iter().for_each(|c| go(c, out));
    }
    go(d, &mut out);
    out
}

/// Ranked, de-duplicated sketches for an utterance. Empty when no root
/// derivation exists.
pub fn parse(utterance: &str, grammar: &Grammar, model: &Model, cfg: ParseConfig) -> Vec<Candidate> {
    parse_tokens(&tokenize(utterance), grammar, model, cfg)
}

pub fn parse_tokens(tokens: &[Token], grammar: &Grammar, model: &Model, cfg: ParseConfig) -> Vec<Candidate> {
    let index = Index::new(grammar);
    let mut chart = Chart { tokens, index: &index, model, beam: cfg.beam.max(1), order: 0, cells: Vec::new() };
    chart.fill();
    let Some(root) = index.category(ROOT) else { return Vec::new() };
    let mut roots: Vec<Arc<Derivation>> = chart
        .cells
        .iter()
        .flat_map(|row| row.iter().flat_map(|cell| cell[root].iter().cloned()))
        .filter(|d| matches!(d.value, Value::Sketch(_)))
        .collect();
    roots.sort_by(ranking);
    let mut seen = HashSet::new();
    roots.retain(|d| seen.insert(d.value.clone()));
    roots.truncate(cfg.limit);
    let probs = softmax(&roots.iter().map(|d| d.score).collect::<Vec<_>>());
    roots
        .into_iter()
        .zip(probs)
        .map(|(d, probability)| {
            let Value::Sketch(sketch) = d.value.clone() else { unreachable!() };
            Candidate { sketch, score: d.score, probability, derivation: d }
        })
        .collect()
}

pub(crate) fn softmax(scores: &[f64]) -> Vec<f64> {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

fn ranking(a: &Arc<Derivation>, b: &Arc<Derivation>) -> Ordering {
    b.score.total_cmp(&a.score).then(a.order.cmp(&b.order))
}

enum Elem {
    Token(Symbol),
    Cat(usize),
}

struct CompiledRule<'g> {
    rule: &'g Rule,
    target: usize,
    pattern: Vec<Elem>,
}

/// Categories numbered in an order where every unary rule goes from a lower
/// to a higher number.
struct Index<'g> {
    names: Vec<String>,
    rules: Vec<CompiledRule<'g>>,
}

impl<'g> Index<'g> {
    fn new(grammar: &'g Grammar) -> Index<'g> {
        let mut names: Vec<String> = Vec::new();
        let add = |c: &str, names: &mut Vec<String>| {
            if !names.iter().any(|n| n == c) {
                names.push(c.to_string());
            }
        };
        for r in &grammar.rules {
            add(&r.category, &mut names);
            for s in &r.pattern {
                if let Symbol::Category(c) = s {
                    add(c, &mut names);
                }
            }
        }
        let names = super::grammar::unary_order(grammar, names);
        let id = |c: &str| names.iter().position(|n| n == c).unwrap();
        let rules = grammar
            .rules
            .iter()
            .map(|rule| CompiledRule {
                rule,
                target: id(&rule.category),
                pattern: rule
                    .pattern
                    .iter()
                    .map(|s| match s {
                        Symbol::Category(c) => Elem::Cat(id(c)),
                        s => Elem::Token(s.clone()),
                    })
                    .collect(),
            })
            .collect();
        Index { names, rules }
    }

    fn category(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

struct Pending {
    score: f64,
    order: u64,
    rule: usize,
    children: Vec<Arc<Derivation>>,
    value: Value,
}

type Cell = Vec<Vec<Arc<Derivation>>>;

struct Chart<'a, 'g> {
    tokens: &'a [Token],
    index: &'a Index<'g>,
    model: &'a Model,
    beam: usize,
    order: u64,
    /// `cells[start][len - 1][category]`
    cells: Vec<Vec<Cell>>,
}

impl<'a> Chart<'a, '_> {
    fn fill(&mut self) {
        let index = self.index;
        let n = self.tokens.len();
        let cats = index.names.len();
        self.cells = (0..n).map(|i| Vec::with_capacity(n - i)).collect();
        for len in 1..=n {
            for start in 0..=n - len {
                let end = start + len;
                let mut pending: Vec<Vec<Pending>> = (0..cats).map(|_| Vec::new()).collect();
                for (r, cr) in index.rules.iter().enumerate() {
                    if !cr.rule.is_unary() {
                        let mut children = Vec::new();
                        let mut captured = Vec::new();
                        self.matches(r, 0, start, start, end, &mut children, &mut captured, &mut pending[cr.target]);
                    }
                }
                let mut cell: Cell = vec![Vec::new(); cats];
                for cat in 0..cats {
                    let kept = self.finish(std::mem::take(&mut pending[cat]), cat, start, end);
                    for (r, cr) in index.rules.iter().enumerate() {
                        if !matches!(cr.pattern.as_slice(), [Elem::Cat(c)] if *c == cat) {
                            continue;
                        }
                        for d in &kept {
                            if let Some(value) = cr.rule.apply(&[&d.value], &[]) {
                                let p = self.pending(r, vec![d.clone()], value, start, end);
                                pending[cr.target].push(p);
                            }
                        }
                    }
                    cell[cat] = kept;
                }
                self.cells[start].push(cell);
            }
        }
    }

    fn cell(&self, start: usize, end: usize) -> &Cell {
        &self.cells[start][end - start - 1]
    }

    /// Enumerates matches of pattern elements `k..` of rule `r`, the first of
    /// them starting at or after `pos` (exactly at `pos` when `k == 0`) and
    /// the last ending at `end`.
    #[allow(clippy::too_many_arguments)]
    fn matches(
        &mut self,
        r: usize,
        k: usize,
        span_start: usize,
        pos: usize,
        end: usize,
        children: &mut Vec<Arc<Derivation>>,
        captured: &mut Vec<&'a Token>,
        out: &mut Vec<Pending>,
    ) {
        let index = self.index;
        let cr = &index.rules[r];
        let last = k + 1 == cr.pattern.len();
        let starts = if k == 0 { pos..pos + 1 } else { pos..end };
        for q in starts {
            match &cr.pattern[k] {
                Elem::Token(sym) => {
                    if q >= end || (last && q + 1 != end) || !sym.matches(&self.tokens[q]) {
                        continue;
                    }
                    let tokens: &'a [Token] = self.tokens;
                    let capture = matches!(sym, Symbol::AnyInt | Symbol::AnyLiteral);
                    if capture {
                        captured.push(&tokens[q]);
                    }
                    if last {
                        self.emit(r, children, captured, span_start, end, out);
                    } else {
                        self.matches(r, k + 1, span_start, q + 1, end, children, captured, out);
                    }
                    if capture {
                        captured.pop();
                    }
                }
                Elem::Cat(c) => {
                    let ends = if last { end..end + 1 } else { q + 1..end };
                    for e in ends {
                        if e <= q || (q == span_start && e == end) {
                            continue;
                        }
                        let ds = self.cell(q, e)[*c].clone();
                        for d in ds {
                            children.push(d);
                            if last {
                                self.emit(r, children, captured, span_start, end, out);
                            } else {
                                self.matches(r, k + 1, span_start, e, end, children, captured, out);
                            }
                            children.pop();
                        }
                    }
                }
            }
        }
    }

    fn emit(
        &mut self,
        r: usize,
        children: &[Arc<Derivation>],
        captured: &[&Token],
        start: usize,
        end: usize,
        out: &mut Vec<Pending>,
    ) {
        let values: Vec<&Value> = children.iter().map(|d| &d.value).collect();
        if let Some(value) = self.index.rules[r].rule.apply(&values, captured) {
            let p = self.pending(r, children.to_vec(), value, start, end);
            out.push(p);
        }
    }

    fn pending(&mut self, r: usize, children: Vec<Arc<Derivation>>, value: Value, start: usize, end: usize) -> Pending {
        let cr = &self.index.rules[r];
        let local = self.model.weight(&rule_feature(&cr.rule.id))
            + self.model.weight(&span_feature(&self.index.names[cr.target], end - start));
        let score = local + children.iter().map(|d| d.score).sum::<f64>();
        self.order += 1;
        Pending { score, order: self.order, rule: r, children, value }
    }

    /// Best-first, one derivation per value, at most `beam` of them.
    fn finish(&self, mut pending: Vec<Pending>, cat: usize, start: usize, end: usize) -> Vec<Arc<Derivation>> {
        pending.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.order.cmp(&b.order)));
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for p in pending {
            if out.len() == self.beam {
                break;
            }
            if !seen.insert(p.value.clone()) {
                continue;
            }
            let rule = self.index.rules[p.rule].rule.id.clone();
            let category = self.index.names[cat].clone();
            let mut features = Features::new();
            for c in &p.children {
                for (f, v) in &c.features {
                    *features.entry(f.clone()).or_default() += v;
                }
            }
            *features.entry(rule_feature(&rule)).or_default() += 1.0;
            *features.entry(span_feature(&category, end - start)).or_default() += 1.0;
            out.push(Arc::new(Derivation {
                category,
                start,
                end,
                rule,
                children: p.children,
                value: p.value,
                features,
                score: p.score,
                order: p.order,
            }));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sketch::parse_sketch;

    const FIG: &str = "the max number of digits before comma is 15 then accept at max 3 numbers";

    fn sketches(c: &[Candidate]) -> Vec<HSketch> {
        c.iter().map(|c| c.sketch.normalized()).collect()
    }

    #[test]
    fn demo_utterance_yields_both_sketches() {
        let out = parse(FIG, &Grammar::demo(), &Model::default(), ParseConfig::default());
        let got = sketches(&out);
        for want in ["Concat(?{<num>,<,>},?{RepeatRange(<num>,1,3),<,>})", "Concat(?{<num>},?{<,>,Repeat(<num>,3)})"] {
            let want = parse_sketch(want).unwrap().normalized();
            assert!(got.contains(&want), "missing {want}");
        }
    }

    #[test]
    fn zero_weights_give_uniform_probabilities() {
        let out = parse(FIG, &Grammar::demo(), &Model::default(), ParseConfig::default());
        assert!(out.len() > 1);
        let p = 1.0 / out.len() as f64;
        assert!(out.iter().all(|c| (c.probability - p).abs() < 1e-12));
    }

    #[test]
    fn features_count_rules_and_spans() {
        let g = Grammar::parse("$PROGRAM -> digits :: CharClassFn(num)\n$ROOT -> $PROGRAM $PROGRAM :: SketchFn").unwrap();
        let out = parse("digits and digits", &g, &Model::default(), ParseConfig::default());
        let d = &out[0].derivation;
        assert_eq!(d.features["rule:L1"], 2.0);
        assert_eq!(d.children[0].features["span:$PROGRAM:len1"], 1.0);
        assert_eq!(d.features["span:$ROOT:len3"], 1.0);
        assert_eq!(extract_features(d), d.features);
        let copy: Derivation = Derivation {
            children: d.children.iter().map(|c| Arc::new((**c).clone())).collect(),
            ..(**d).clone()
        };
        assert_eq!(extract_features(&copy), extract_features(d));
    }

    #[test]
    fn no_root_means_no_candidates() {
        assert!(parse("nothing useful", &Grammar::demo(), &Model::default(), ParseConfig::default()).is_empty());
    }
}
