//! Sketch-guided search for regexes consistent with examples.

mod approx;
mod dedup;
mod examples;
mod expand;
mod partial;

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::time::{Duration, Instant};

pub use approx::{approximate, ApproxPair};
pub use examples::{infeasible, is_correct, Checker, ExampleError, Examples};
pub use expand::{expand, expand_with, ExpandOptions};
pub use partial::{Node, PartialRegex};

use crate::automaton::equivalent;
use dedup::Canon;
use crate::regex::{BinaryOp, CharClass, Regex, Repetition, UnaryOp};
use crate::sketch::{HSketch, DEFAULT_DEPTH};
use crate::solver::{infer_constants_with, InferOptions};

#[derive(Debug, Clone)]
pub struct SynthConfig {
    /// Depth given to holes that do not carry one.
    pub depth: u32,
    pub timeout: Option<Duration>,
    pub top_k: usize,
    pub prune: bool,
    /// Skip mirror images of commutative operators and partial regexes that
    /// only differ from an explored one by equivalent concrete subtrees.
    pub canonicalize: bool,
    /// Membership-failure cache for StartsWith/EndsWith and RepeatAtLeast.
    pub failure_cache: bool,
    /// Upper bound for inferred integer constants; defaults to the longest example.
    pub max_int: Option<u32>,
    /// Classes offered to sibling holes; defaults to [`default_palette`].
    pub palette: Option<Vec<CharClass>>,
    /// Partial regexes larger than this are dropped.
    pub max_size: Option<usize>,
    /// Extra cost of every Not and And node. Complements and intersections
    /// fit small example sets with little structure, so they are tried late.
    pub costly_op_penalty: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            depth: DEFAULT_DEPTH,
            timeout: Some(Duration::from_secs(60)),
            top_k: 1,
            prune: true,
            canonicalize: true,
            failure_cache: true,
            max_int: None,
            palette: None,
            max_size: None,
            costly_op_penalty: 2,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SynthStats {
    pub popped: u64,
    pub pushed: u64,
    pub pruned: u64,
    pub duplicates: u64,
    pub checked: u64,
    pub cache_hits: u64,
    pub solver_calls: u64,
    pub timed_out: bool,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, Default)]
pub struct SynthResult {
    /// Consistent regexes in discovery order.
    pub regexes: Vec<Regex>,
    pub stats: SynthStats,
    pub diagnostics: Vec<String>,
}

/// Named classes, literal classes of the sketch, and every character of the
/// examples that is not a letter or digit.
pub fn default_palette(sketch: &HSketch, ex: &Examples) -> Vec<CharClass> {
    let mut out = CharClass::NAMED.to_vec();
    let mut lits = Vec::new();
    sketch.classes(&mut lits);
    for s in ex.positives().iter().chain(ex.negatives()) {
        lits.extend(s.bytes().filter(|b| !b.is_ascii_alphanumeric()).map(CharClass::Literal));
    }
    lits.retain(|c| matches!(c, CharClass::Literal(_)));
    lits.sort();
    lits.dedup();
    out.extend(lits);
    out
}

/// Number of Not and And nodes.
fn costly_ops(n: &Node) -> usize {
    match n {
        Node::Class(_) | Node::Epsilon | Node::EmptySet | Node::Open(_) => 0,
        Node::Unary(op, a) => (*op == UnaryOp::Not) as usize + costly_ops(a),
        Node::Binary(op, a, b) => (*op == BinaryOp::And) as usize + costly_ops(a) + costly_ops(b),
        Node::Repeat(a, _) => costly_ops(a),
    }
}

struct Item {
    size: usize,
    seq: u64,
    p: PartialRegex,
}

impl PartialEq for Item {
    fn eq(&self, other: &Self) -> bool {
        (self.size, self.seq) == (other.size, other.seq)
    }
}

impl Eq for Item {}

impl PartialOrd for Item {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Item {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.size, self.seq).cmp(&(other.size, other.seq))
    }
}

struct Search<'a> {
    cfg: &'a SynthConfig,
    ex: &'a Examples,
    checker: Checker,
    heap: BinaryHeap<Reverse<Item>>,
    seq: u64,
    seen: HashSet<Regex>,
    canon: Canon,
    explored: HashSet<Vec<u32>>,
    failed_contains: HashSet<Regex>,
    failed_at_least: HashMap<Regex, u32>,
    out: SynthResult,
}

impl Search<'_> {
    fn push(&mut self, p: PartialRegex) {
        let size = p.size() + self.cfg.costly_op_penalty * costly_ops(&p.root);
        if self.cfg.max_size.is_some_and(|m| size > m) {
            return;
        }
        self.seq += 1;
        self.out.stats.pushed += 1;
        self.heap.push(Reverse(Item { size, seq: self.seq, p }));
    }

    fn known_failure(&mut self, r: &Regex) -> bool {
        if !self.cfg.failure_cache {
            return false;
        }
        let hit = match r {
            Regex::Unary(UnaryOp::StartsWith | UnaryOp::EndsWith, a) => {
                self.failed_contains.contains(&Regex::contains((**a).clone()))
            }
            Regex::Repeat(a, Repetition::AtLeast(c)) => self.failed_at_least.get(a).is_some_and(|m| m <= c),
            _ => false,
        };
        if hit {
            self.out.stats.cache_hits += 1;
        }
        hit
    }

    fn record_failure(&mut self, r: &Regex) {
        if !self.cfg.failure_cache {
            return;
        }
        match r {
            Regex::Unary(UnaryOp::Contains, _) => {
                self.failed_contains.insert(r.clone());
            }
            Regex::Repeat(a, Repetition::AtLeast(c)) => {
                let m = self.failed_at_least.entry((**a).clone()).or_insert(*c);
                *m = (*m).min(*c);
            }
            _ => {}
        }
    }

    fn check(&mut self, r: Regex) {
        if !self.seen.insert(canonical(&r)) {
            return;
        }
        if self.known_failure(&r) {
            return;
        }
        self.out.stats.checked += 1;
        if !self.checker.accepts_positives(&r) {
            self.record_failure(&r);
            return;
        }
        if !self.checker.rejects_negatives(&r) {
            return;
        }
        if self.cfg.top_k <= 5 {
            for found in &self.out.regexes {
                match equivalent(found, &r) {
                    Ok(true) => return,
                    Ok(false) => {}
                    Err(e) => self.out.diagnostics.push(format!("equivalence check skipped for {r}: {e}")),
                }
            }
        }
        self.out.regexes.push(r);
    }
}

/// Regex with the arguments of commutative operators in a fixed order.
fn canonical(r: &Regex) -> Regex {
    match r {
        Regex::Class(_) | Regex::Epsilon | Regex::EmptySet => r.clone(),
        Regex::Unary(op, a) => Regex::unary(*op, canonical(a)),
        Regex::Binary(op, a, b) => {
            let (a, b) = (canonical(a), canonical(b));
            if op.is_commutative() && b.to_string() < a.to_string() {
                Regex::binary(*op, b, a)
            } else {
                Regex::binary(*op, a, b)
            }
        }
        Regex::Repeat(a, rep) => Regex::Repeat(Box::new(canonical(a)), *rep),
    }
}

/// Up to `top_k` regexes that complete `sketch` and agree with `ex`.
pub fn synthesize(sketch: &HSketch, ex: &Examples, cfg: &SynthConfig) -> SynthResult {
    let start = Instant::now();
    let deadline = cfg.timeout.map(|t| start + t);
    let opts = ExpandOptions {
        palette: cfg.palette.clone().unwrap_or_else(|| default_palette(sketch, ex)),
        canonical_commutative: cfg.canonicalize,
    };
    let infer = InferOptions { max: cfg.max_int.unwrap_or_else(|| ex.max_len()), prune: cfg.prune, deadline };
    let mut search = Search {
        cfg,
        ex,
        checker: Checker::new(ex),
        heap: BinaryHeap::new(),
        seq: 0,
        seen: HashSet::new(),
        canon: Canon::default(),
        explored: HashSet::new(),
        failed_contains: HashSet::new(),
        failed_at_least: HashMap::new(),
        out: SynthResult::default(),
    };
    search.push(PartialRegex::from_sketch(&sketch.with_depth(cfg.depth)));
    while search.out.regexes.len() < cfg.top_k.max(1) {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            search.out.stats.timed_out = true;
            break;
        }
        let Some(Reverse(item)) = search.heap.pop() else {
            break;
        };
        if cfg.canonicalize && !item.p.is_concrete() && !search.explored.insert(search.canon.key(&item.p.root, &mut search.checker)) {
            search.out.stats.duplicates += 1;
            continue;
        }
        search.out.stats.popped += 1;
        let p = item.p;
        if p.is_concrete() {
            search.check(p.to_regex().expect("concrete"));
        } else if p.is_symbolic() {
            let inferred = infer_constants_with(&p, search.ex, &mut search.checker, &infer);
            search.out.stats.solver_calls += inferred.solver_calls as u64;
            if !inferred.complete {
                search.out.stats.timed_out = true;
            }
            for r in inferred.regexes {
                search.push(PartialRegex::from_regex(&r));
            }
        } else {
            let path = p.root.first_open().expect("open node");
            for q in expand_with(&p, &path, &opts) {
                if cfg.prune && search.checker.infeasible(&q) {
                    search.out.stats.pruned += 1;
                } else {
                    search.push(q);
                }
            }
        }
    }
    search.out.stats.elapsed = start.elapsed();
    search.out
}
