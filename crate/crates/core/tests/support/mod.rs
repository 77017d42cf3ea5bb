//! Checks shared by the integration tests and the acceptance target. Each
//! check returns a one-line summary on success and the first failure
//! otherwise.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use regel_core::automaton::equivalent;
use regel_core::nlp::{parse, train, Grammar, Model, ParseConfig, TrainConfig};
use regel_core::regex::{parse_regex, BinaryOp, CharClass, Regex, RepeatOp, Repetition, UnaryOp};
use regel_core::sketch::{enumerate_with, member, parse_sketch, HSketch, IntSlot, SymId};
use regel_core::solver::{encode, infer_constants, instantiate_positives, solve, Bounds, InferOptions};
use regel_core::synthesis::{
    approximate, expand_with, infeasible, is_correct, synthesize, ExpandOptions, Examples, Node, PartialRegex,
    SynthConfig,
};

pub type Check = Result<String, String>;

pub fn workspace() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub const DECIMAL_SKETCH: &str = "Concat(?{<num>,<,>},?{RepeatRange(<num>,1,3),<,>})";
pub const DECIMAL_TARGET: &str = "Concat(RepeatRange(<num>,1,15),Optional(Concat(<.>,RepeatRange(<num>,1,3))))";
pub const DECIMAL_ALT_SKETCH: &str = "Concat(?{<num>},?{<,>,Repeat(<num>,3)})";
pub const DECIMAL_UTTERANCE: &str = "the max number of digits before comma is 15 then accept at max 3 numbers";

pub fn decimal_examples() -> Examples {
    Examples::new(
        ["123456789.123", "123456789123456.12", "12345.1", "123456789123456"],
        ["1234567891234567", "123.1234", "1.12345", ".1234"],
    )
    .unwrap()
}

fn re(s: &str) -> Regex {
    parse_regex(s).unwrap()
}

// ---------------------------------------------------------------------------
// reference semantics: languages cut down to a finite universe of strings

/// All strings over `alphabet` up to `max_len`, with concatenation splits
/// and substrings precomputed by index.
pub struct Universe {
    pub strings: Vec<Vec<u8>>,
    splits: Vec<Vec<(usize, usize)>>,
    substrings: Vec<Vec<usize>>,
    memo: HashMap<Regex, Vec<bool>>,
}

impl Universe {
    pub fn new(alphabet: &[u8], max_len: usize) -> Universe {
        let mut strings = vec![Vec::new()];
        let mut frontier = vec![Vec::new()];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for s in &frontier {
                for &c in alphabet {
                    let mut t: Vec<u8> = s.clone();
                    t.push(c);
                    next.push(t);
                }
            }
            strings.extend(next.iter().cloned());
            frontier = next;
        }
        let index: HashMap<Vec<u8>, usize> = strings.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        let splits = strings
            .iter()
            .map(|s| (0..=s.len()).map(|k| (index[&s[..k]], index[&s[k..]])).collect())
            .collect();
        let substrings = strings
            .iter()
            .map(|s| {
                let mut out: Vec<usize> = (0..=s.len()).flat_map(|i| (i..=s.len()).map(move |j| (i, j))).map(|(i, j)| index[&s[i..j]]).collect();
                out.sort_unstable();
                out.dedup();
                out
            })
            .collect();
        Universe { strings, splits, substrings, memo: HashMap::new() }
    }

    pub fn text(&self, i: usize) -> String {
        String::from_utf8(self.strings[i].clone()).unwrap()
    }

    fn concat(&self, a: &[bool], b: &[bool]) -> Vec<bool> {
        self.splits.iter().map(|sp| sp.iter().any(|&(u, v)| a[u] && b[v])).collect()
    }

    fn power(&self, a: &[bool], k: u32) -> Vec<bool> {
        let mut out: Vec<bool> = self.strings.iter().map(|s| s.is_empty()).collect();
        for _ in 0..k {
            out = self.concat(&out, a);
        }
        out
    }

    fn star(&self, a: &[bool]) -> Vec<bool> {
        let mut out: Vec<bool> = self.strings.iter().map(|s| s.is_empty()).collect();
        loop {
            let step = self.concat(&out, a);
            let next: Vec<bool> = out.iter().zip(&step).map(|(x, y)| *x || *y).collect();
            if next == out {
                return out;
            }
            out = next;
        }
    }

    /// Membership of every universe string in `r`.
    pub fn lang(&mut self, r: &Regex) -> Vec<bool> {
        if let Some(hit) = self.memo.get(r) {
            return hit.clone();
        }
        let n = self.strings.len();
        let out: Vec<bool> = match r {
            Regex::Class(c) => self.strings.iter().map(|s| s.len() == 1 && c.matches(s[0])).collect(),
            Regex::Epsilon => self.strings.iter().map(|s| s.is_empty()).collect(),
            Regex::EmptySet => vec![false; n],
            Regex::Unary(op, a) => {
                let a = self.lang(a);
                match op {
                    UnaryOp::Not => a.iter().map(|x| !x).collect(),
                    UnaryOp::Optional => a.iter().zip(&self.strings).map(|(x, s)| *x || s.is_empty()).collect(),
                    UnaryOp::KleeneStar => self.star(&a),
                    UnaryOp::StartsWith => self.splits.iter().map(|sp| sp.iter().any(|&(u, _)| a[u])).collect(),
                    UnaryOp::EndsWith => self.splits.iter().map(|sp| sp.iter().any(|&(_, v)| a[v])).collect(),
                    UnaryOp::Contains => self.substrings.iter().map(|subs| subs.iter().any(|&u| a[u])).collect(),
                }
            }
            Regex::Binary(op, a, b) => {
                let (a, b) = (self.lang(a), self.lang(b));
                match op {
                    BinaryOp::Concat => self.concat(&a, &b),
                    BinaryOp::Or => a.iter().zip(&b).map(|(x, y)| *x || *y).collect(),
                    BinaryOp::And => a.iter().zip(&b).map(|(x, y)| *x && *y).collect(),
                }
            }
            Regex::Repeat(a, rep) => {
                let a = self.lang(a);
                match *rep {
                    Repetition::Exactly(k) => self.power(&a, k),
                    Repetition::AtLeast(k) => self.concat(&self.power(&a, k), &self.star(&a)),
                    Repetition::Between(lo, hi) => {
                        let mut acc = vec![false; n];
                        for k in lo..=hi {
                            acc = acc.iter().zip(self.power(&a, k)).map(|(x, y)| *x || y).collect();
                        }
                        acc
                    }
                }
            }
        };
        self.memo.insert(r.clone(), out.clone());
        out
    }
}

// ---------------------------------------------------------------------------
// approximation

pub fn approximation_fixture() -> Check {
    // Concat(<num>, Not(?1{<,>, RepeatRange(<num>,1,3)}))
    let hole = parse_sketch("?1{<,>,RepeatRange(<num>,1,3)}").unwrap();
    let root = Node::Binary(
        BinaryOp::Concat,
        Arc::new(Node::Class(CharClass::Num)),
        Arc::new(Node::Unary(UnaryOp::Not, Arc::new(Node::Open(Arc::new(hole))))),
    );
    let p = PartialRegex { root: Arc::new(root), next_sym: 0 };
    let pair = approximate(&p);
    let over = re("Concat(<num>,KleeneStar(<any>))");
    let under = re("Concat(<num>,Not(Or(<,>,RepeatRange(<num>,1,3))))");
    match (equivalent(&pair.over, &over), equivalent(&pair.under, &under)) {
        (Ok(true), Ok(true)) => Ok(format!("{p} -> ({}, {})", pair.over, pair.under)),
        _ => Err(format!("{p} -> ({}, {})", pair.over, pair.under)),
    }
}

const APPROX_ALPHABET: &[u8] = b"a1.";

pub fn approx_palette() -> Vec<CharClass> {
    vec![CharClass::Literal(b'a'), CharClass::Literal(b'.'), CharClass::Num, CharClass::Let]
}

fn random_class(rng: &mut StdRng) -> CharClass {
    let pool = [CharClass::Literal(b'a'), CharClass::Literal(b'1'), CharClass::Literal(b'.'), CharClass::Num, CharClass::Let];
    pool[rng.gen_range(0..pool.len())]
}

fn random_int(rng: &mut StdRng, next: &mut u32) -> IntSlot {
    if rng.gen_bool(0.5) {
        IntSlot::Const(rng.gen_range(1..=3))
    } else {
        *next += 1;
        IntSlot::Sym(SymId(*next - 1))
    }
}

fn random_sketch(rng: &mut StdRng, budget: u32, deep: &mut bool, next: &mut u32) -> HSketch {
    let class = |rng: &mut StdRng| HSketch::concrete(Regex::Class(random_class(rng)));
    if budget == 0 || (budget < 2 && rng.gen_range(0..10) < 4) {
        return match rng.gen_range(0..4) {
            0 => class(rng),
            1 | 2 => {
                let n = rng.gen_range(1..=2);
                HSketch::hole_d(1, (0..n).map(|_| class(rng)).collect())
            }
            _ if *deep => {
                *deep = false;
                HSketch::hole_d(2, vec![class(rng)])
            }
            _ => HSketch::hole_d(1, vec![class(rng)]),
        };
    }
    match rng.gen_range(0..3) {
        0 => HSketch::unary(UnaryOp::ALL[rng.gen_range(0..6)], random_sketch(rng, budget - 1, deep, next)),
        1 => {
            let a = random_sketch(rng, budget - 1, deep, next);
            HSketch::binary(BinaryOp::ALL[rng.gen_range(0..3)], a, random_sketch(rng, budget - 1, deep, next))
        }
        _ => {
            let a = random_sketch(rng, budget - 1, deep, next);
            let rep = match RepeatOp::ALL[rng.gen_range(0..3)] {
                RepeatOp::Repeat => Repetition::Exactly(random_int(rng, next)),
                RepeatOp::RepeatAtLeast => Repetition::AtLeast(random_int(rng, next)),
                RepeatOp::RepeatRange => {
                    let (lo, hi) = (random_int(rng, next), random_int(rng, next));
                    match (lo, hi) {
                        (IntSlot::Const(x), IntSlot::Const(y)) if x > y => Repetition::Between(hi, lo),
                        _ => Repetition::Between(lo, hi),
                    }
                }
            };
            HSketch::repeat(a, rep)
        }
    }
}

/// A partial regex reached from a random small sketch by a few random
/// expansion steps.
pub fn random_partial(seed: u64) -> PartialRegex {
    let mut rng = StdRng::seed_from_u64(seed);
    let s = random_sketch(&mut rng, 2, &mut true, &mut 0);
    let mut p = PartialRegex::from_sketch(&s);
    let opts = ExpandOptions { palette: approx_palette(), canonical_commutative: false };
    for _ in 0..rng.gen_range(0..=4) {
        let Some(path) = p.root.first_open() else { break };
        let next = expand_with(&p, &path, &opts);
        if next.is_empty() {
            break;
        }
        p = next[rng.gen_range(0..next.len())].clone();
    }
    p
}

fn node_sketch(n: &Node) -> HSketch {
    match n {
        Node::Class(c) => HSketch::concrete(Regex::Class(*c)),
        Node::Epsilon => HSketch::concrete(Regex::Epsilon),
        Node::EmptySet => HSketch::concrete(Regex::EmptySet),
        Node::Open(s) => (**s).clone(),
        Node::Unary(op, a) => HSketch::unary(*op, node_sketch(a)),
        Node::Binary(op, a, b) => HSketch::binary(*op, node_sketch(a), node_sketch(b)),
        Node::Repeat(a, rep) => HSketch::repeat(node_sketch(a), *rep),
    }
}

/// Every completion with integers up to `int_bound`.
pub fn completions(p: &PartialRegex, int_bound: u32) -> Vec<Regex> {
    enumerate_with(&node_sketch(&p.root), int_bound, &approx_palette()).unwrap().into_iter().collect()
}

/// Over/under containment for every completion of one partial regex on
/// every universe string; returns the number of completions checked.
pub fn check_approximation(p: &PartialRegex, u: &mut Universe) -> Result<usize, String> {
    let pair = approximate(p);
    let over = u.lang(&pair.over);
    let under = u.lang(&pair.under);
    let all = completions(p, 3);
    for r in &all {
        let l = u.lang(r);
        for i in 0..l.len() {
            if l[i] && !over[i] {
                return Err(format!("{p}: completion {r} accepts {:?}, over {} does not", u.text(i), pair.over));
            }
            if under[i] && !l[i] {
                return Err(format!("{p}: under {} accepts {:?}, completion {r} does not", pair.under, u.text(i)));
            }
        }
    }
    Ok(all.len())
}

pub fn approximation_suite(count: u64) -> Check {
    let mut u = Universe::new(APPROX_ALPHABET, 5);
    let mut total = 0;
    for seed in 0..count {
        if seed % 20 == 0 {
            // keep the memo from growing without bound
            u.memo.clear();
        }
        total += check_approximation(&random_partial(seed), &mut u)?;
    }
    Ok(format!("{count} partial regexes, {total} completions, {} strings each, 0 violations", u.strings.len()))
}

// ---------------------------------------------------------------------------
// constant inference

pub const INFER_MAX: u32 = 6;

fn random_concrete(rng: &mut StdRng, budget: u32) -> Node {
    if budget == 0 || rng.gen_bool(0.35) {
        return Node::Class(random_class(rng));
    }
    let sub = |rng: &mut StdRng| Arc::new(random_concrete(rng, budget - 1));
    match rng.gen_range(0..4) {
        0 => Node::Unary(UnaryOp::ALL[rng.gen_range(0..6)], sub(rng)),
        1 | 2 => {
            let a = sub(rng);
            Node::Binary(BinaryOp::ALL[rng.gen_range(0..3)], a, sub(rng))
        }
        _ => Node::Repeat(sub(rng), Repetition::Exactly(IntSlot::Const(rng.gen_range(1..=2)))),
    }
}

/// Wraps one or two random subtrees of a random concrete regex in a
/// repetition with symbolic integers; at most two symbols in total.
pub fn random_symbolic(seed: u64) -> PartialRegex {
    let mut rng = StdRng::seed_from_u64(seed);
    let base = random_concrete(&mut rng, 3);
    let mut next = 0u32;
    fn wrap(n: &Node, rng: &mut StdRng, next: &mut u32) -> Node {
        fn fresh(next: &mut u32) -> IntSlot {
            *next += 1;
            IntSlot::Sym(SymId(*next - 1))
        }
        let here = *next < 2 && rng.gen_bool(0.4);
        let inner = match n {
            Node::Unary(op, a) => Node::Unary(*op, Arc::new(wrap(a, rng, next))),
            Node::Binary(op, a, b) => {
                let a = wrap(a, rng, next);
                Node::Binary(*op, Arc::new(a), Arc::new(wrap(b, rng, next)))
            }
            Node::Repeat(a, rep) => Node::Repeat(Arc::new(wrap(a, rng, next)), *rep),
            other => other.clone(),
        };
        if !here || *next >= 2 {
            return inner;
        }
        let rep = match rng.gen_range(0..3) {
            0 => Repetition::Exactly(fresh(next)),
            1 => Repetition::AtLeast(fresh(next)),
            _ if *next == 0 => Repetition::Between(fresh(next), fresh(next)),
            _ => Repetition::Between(IntSlot::Const(rng.gen_range(1..=2)), fresh(next)),
        };
        Node::Repeat(Arc::new(inner), rep)
    }
    let mut root = wrap(&base, &mut rng, &mut next);
    if next == 0 {
        root = Node::Repeat(Arc::new(root), Repetition::AtLeast(IntSlot::Sym(SymId(0))));
        next = 1;
    }
    PartialRegex { root: Arc::new(root), next_sym: next }
}

/// Every assignment of `syms` over `[1, max]`.
pub fn assignments(syms: &[SymId], max: u32) -> Vec<Vec<(SymId, u32)>> {
    syms.iter().fold(vec![Vec::new()], |acc, &k| {
        acc.iter()
            .flat_map(|prefix| {
                (1..=max).map(move |v| {
                    let mut a = prefix.clone();
                    a.push((k, v));
                    a
                })
            })
            .collect()
    })
}

fn instantiate(p: &PartialRegex, a: &[(SymId, u32)]) -> Option<Regex> {
    let q = a.iter().fold(p.clone(), |q, &(k, v)| q.assign(k, v));
    if !q.root.ranges_valid() {
        return None;
    }
    q.to_regex()
}

/// Examples drawn from the language of one instantiation: up to three
/// members and three non-members of the universe.
pub fn examples_for(p: &PartialRegex, seed: u64, u: &mut Universe) -> Option<Examples> {
    let mut rng = StdRng::seed_from_u64(seed ^ 0x5eed);
    let all = assignments(&p.syms(), INFER_MAX);
    let pick = &all[rng.gen_range(0..all.len())];
    let target = instantiate(p, pick)?;
    let l = u.lang(&target);
    let members: Vec<usize> = (0..l.len()).filter(|&i| l[i]).collect();
    let others: Vec<usize> = (0..l.len()).filter(|&i| !l[i]).collect();
    if members.is_empty() {
        return None;
    }
    let sample = |rng: &mut StdRng, from: &[usize]| -> Vec<String> {
        let mut chosen = BTreeSet::new();
        for _ in 0..3.min(from.len()) {
            chosen.insert(from[rng.gen_range(0..from.len())]);
        }
        chosen.into_iter().map(|i| u.text(i)).collect()
    };
    let pos = sample(&mut rng, &members);
    let neg = sample(&mut rng, &others);
    Examples::new(pos, neg).ok()
}

/// Completeness of constant inference and soundness of the length encoding
/// for one symbolic regex; returns the number of consistent assignments.
pub fn check_infer(p: &PartialRegex, ex: &Examples, u: &mut Universe) -> Result<usize, String> {
    let syms = p.syms();
    let (phi, x) = encode(p, INFER_MAX);
    let mut found = Vec::new();
    for prune in [true, false] {
        let opts = InferOptions { max: INFER_MAX, prune, deadline: None };
        found.push(infer_constants(p, ex, &opts).regexes.into_iter().collect::<BTreeSet<Regex>>());
    }
    let mut consistent = 0;
    for a in assignments(&syms, INFER_MAX) {
        let Some(r) = instantiate(p, &a) else { continue };
        let l = u.lang(&r);
        let ok = |s: &String| u.strings.iter().position(|t| t == s.as_bytes()).map(|i| l[i]);
        let pos_ok = ex.positives().iter().all(|s| ok(s) == Some(true));
        let neg_ok = ex.negatives().iter().all(|s| ok(s) == Some(false));
        if pos_ok && neg_ok {
            consistent += 1;
            for (set, prune) in found.iter().zip([true, false]) {
                if !set.contains(&r) {
                    return Err(format!("{p} with {a:?}: {r} is consistent but missing (prune {prune})"));
                }
            }
        }
        // every length the instantiation matches must satisfy its encoding
        let lens: BTreeSet<usize> = (0..l.len()).filter(|&i| l[i]).map(|i| u.strings[i].len()).collect();
        let fixed = a.iter().fold(phi.clone(), |f, &(k, v)| f.subst_sym(k, v));
        for len in lens {
            if solve(&fixed.subst_var(x, len as u64), &Bounds::new(INFER_MAX)).is_none() {
                return Err(format!("{p} with {a:?}: encoding rejects a match of length {len}"));
            }
        }
    }
    Ok(consistent)
}

pub fn infer_suite(count: u64) -> Check {
    let mut u = Universe::new(b"a1.", 6);
    let (mut done, mut seed, mut consistent) = (0, 0u64, 0);
    while done < count {
        let p = random_symbolic(seed);
        let ex = examples_for(&p, seed, &mut u);
        seed += 1;
        let Some(ex) = ex else { continue };
        consistent += check_infer(&p, &ex, &mut u)?;
        done += 1;
    }
    Ok(format!("{count} symbolic regexes, {consistent} consistent instantiations, 0 missed, 0 rejected matches"))
}

/// Length-constraint fixture for
/// Concat(Repeat(Or(<.>,<num>),κ1), RepeatAtLeast(RepeatRange(<num>,1,3),κ2)).
pub fn positive_length_fixture() -> Check {
    let s = parse_sketch("Concat(Repeat(Or(<.>,<num>),?),RepeatAtLeast(RepeatRange(<num>,1,3),?))").unwrap();
    let k1 = SymId(0);
    let k2 = SymId(1);
    let root = Node::Binary(
        BinaryOp::Concat,
        Arc::new(Node::Repeat(Arc::new(Node::from_regex(&re("Or(<.>,<num>)"))), Repetition::Exactly(IntSlot::Sym(k1)))),
        Arc::new(Node::Repeat(
            Arc::new(Node::from_regex(&re("RepeatRange(<num>,1,3)"))),
            Repetition::AtLeast(IntSlot::Sym(k2)),
        )),
    );
    let p = PartialRegex { root: Arc::new(root), next_sym: 2 };
    if node_sketch(&p.root).to_string() != s.to_string() {
        return Err(format!("fixture mismatch: {} vs {s}", node_sketch(&p.root)));
    }
    let max = 18;
    let (phi, x) = encode(&p, max);
    // the encoding alone: len = κ1 + (anything ≥ κ2)
    for a in 1..=8 {
        for b in 1..=8 {
            let f = phi.subst_sym(k1, a).subst_sym(k2, b);
            for x0 in 0..=20u64 {
                let sat = solve(&f.subst_var(x, x0), &Bounds::new(max)).is_some();
                if sat != (x0 >= (a + b) as u64) {
                    return Err(format!("encoding at κ=({a},{b}), x={x0}: {sat}"));
                }
            }
        }
    }
    let ex = decimal_examples();
    let psi = instantiate_positives(&phi, x, &ex);
    for a in 1..=8 {
        for b in 1..=8 {
            let sat = solve(&psi.subst_sym(k1, a).subst_sym(k2, b), &Bounds::new(max)).is_some();
            if sat != (a + b <= 7) {
                return Err(format!("constraint at ({a},{b}) is {sat}"));
            }
        }
    }
    let model = solve(&psi, &Bounds::with_syms([k1, k2], max)).ok_or("constraint unsatisfiable")?;
    if model.get(&k1) != Some(&1) || model.get(&k2) != Some(&1) {
        return Err(format!("solve returned {model:?}"));
    }
    if !infeasible(&p.assign(k1, 1), &ex) {
        return Err("assigning κ1 := 1 is not pruned".into());
    }
    Ok("constraint ⇔ κ1+κ2 ≤ 7 on [1,8]², solve = {κ1:1, κ2:1}, κ1 := 1 pruned".into())
}

// ---------------------------------------------------------------------------
// desk corpus and synthesis

#[derive(Debug, Clone)]
pub struct DeskBenchmark {
    pub id: String,
    pub examples: Examples,
    pub ground_truth: Regex,
    pub sketch: HSketch,
}

pub fn desk_corpus() -> Vec<DeskBenchmark> {
    let dir = workspace().join("benchmarks/desk");
    let mut files: Vec<PathBuf> = std::fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    files
        .iter()
        .filter(|f| f.extension().is_some_and(|e| e == "json"))
        .map(|f| {
            let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(f).unwrap()).unwrap();
            let strs = |k: &str| -> Vec<String> {
                v[k].as_array().unwrap().iter().map(|s| s.as_str().unwrap().to_string()).collect()
            };
            DeskBenchmark {
                id: v["id"].as_str().unwrap().to_string(),
                examples: Examples::new(strs("positives"), strs("negatives")).unwrap(),
                ground_truth: re(v["ground_truth"].as_str().unwrap()),
                sketch: parse_sketch(v["sketches"][0].as_str().unwrap()).unwrap(),
            }
        })
        .collect()
}

pub fn regression() -> Check {
    let sketch = parse_sketch(DECIMAL_SKETCH).unwrap();
    let ex = decimal_examples();
    let cfg = SynthConfig { depth: 3, top_k: 5, max_int: Some(18), timeout: Some(Duration::from_secs(60)), ..Default::default() };
    let res = synthesize(&sketch, &ex, &cfg);
    let target = re(DECIMAL_TARGET);
    for r in &res.regexes {
        if !member(r, &sketch) || !is_correct(r, &ex) {
            return Err(format!("{r} is not a consistent member of the sketch"));
        }
    }
    match res.regexes.iter().position(|r| equivalent(r, &target).unwrap_or(false)) {
        Some(i) => Ok(format!("target at rank {} of {} in {:.1?}", i + 1, res.regexes.len(), res.stats.elapsed)),
        None => Err(format!(
            "target not in top 5 ({:.1?}, timed out: {}): {:?}",
            res.stats.elapsed,
            res.stats.timed_out,
            res.regexes.iter().map(|r| r.to_string()).collect::<Vec<_>>()
        )),
    }
}

pub fn pruning_preservation() -> Check {
    let (mut on_total, mut off_total) = (0u64, 0u64);
    for b in desk_corpus() {
        let run = |prune| {
            let cfg = SynthConfig { top_k: 3, prune, timeout: Some(Duration::from_secs(60)), ..Default::default() };
            synthesize(&b.sketch, &b.examples, &cfg)
        };
        let (on, off) = (run(true), run(false));
        if on.stats.timed_out || off.stats.timed_out {
            return Err(format!("{}: timed out", b.id));
        }
        let set = |r: &[Regex]| r.iter().filter(|r| is_correct(r, &b.examples)).cloned().collect::<BTreeSet<_>>();
        if set(&on.regexes) != set(&off.regexes) {
            return Err(format!("{}: results differ: {:?} vs {:?}", b.id, on.regexes, off.regexes));
        }
        if on.stats.popped >= off.stats.popped {
            return Err(format!("{}: pruning explored {} items, no pruning {}", b.id, on.stats.popped, off.stats.popped));
        }
        on_total += on.stats.popped;
        off_total += off.stats.popped;
    }
    let ratio = off_total as f64 / on_total as f64;
    let line = format!("explored {on_total} vs {off_total} items, {ratio:.1}x fewer with pruning");
    if ratio >= 2.0 {
        Ok(line)
    } else {
        Err(line)
    }
}

// ---------------------------------------------------------------------------
// semantic parser

pub fn toy_set() -> Vec<(String, HSketch)> {
    let text = std::fs::read_to_string(workspace().join("data/toy.jsonl")).unwrap();
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let v: serde_json::Value = serde_json::from_str(l).unwrap();
            (v["utterance"].as_str().unwrap().to_string(), parse_sketch(v["sketch"].as_str().unwrap()).unwrap())
        })
        .collect()
}

pub fn parser_fixture() -> Check {
    let g = Grammar::demo();
    let out = parse(DECIMAL_UTTERANCE, &g, &Model::default(), ParseConfig::default());
    let got: BTreeSet<HSketch> = out.iter().map(|c| c.sketch.normalized()).collect();
    for want in [DECIMAL_SKETCH, DECIMAL_ALT_SKETCH] {
        if !got.contains(&parse_sketch(want).unwrap().normalized()) {
            return Err(format!("{want} not among {} candidates", out.len()));
        }
    }
    let uniform = 1.0 / out.len() as f64;
    if out.iter().any(|c| (c.probability - uniform).abs() > 1e-12) {
        return Err("θ = 0 probabilities are not uniform".into());
    }
    let data = toy_set();
    let report = train(&data, &g, TrainConfig::default()).map_err(|e| e.to_string())?;
    let right = data
        .iter()
        .filter(|(u, h)| {
            parse(u, &g, &report.model, ParseConfig::default()).first().map(|c| c.sketch.normalized()) == Some(h.normalized())
        })
        .count();
    let line = format!("{} candidates incl. both sketches, uniform at θ = 0, toy top-1 {right}/{}", out.len(), data.len());
    if right * 10 >= data.len() * 8 {
        Ok(line)
    } else {
        Err(line)
    }
}
