//! Simulation of the interactive protocol: synthesize, and while the
//! intended regex is not among the results, add examples that rule out the
//! top wrong candidate and try again.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use regel_core::automaton::{distinguishing_string, equivalent, AutomatonError};
use regel_core::nlp::{Grammar, Model};
use regel_core::regex::{is_match, BinaryOp, Regex};
use regel_core::synthesis::Examples;
use serde::Serialize;

use crate::benchmark::Loaded;
use crate::e2e::{run_description, run_sketches, E2eConfig};

#[derive(Debug, Clone)]
pub struct BenchConfig {
    /// Refinement rounds after the first run.
    pub iterations: usize,
    pub examples_per_iteration: usize,
    pub e2e: E2eConfig,
    /// Benchmarks run concurrently; each runs its sketches one at a time.
    pub parallel: usize,
    pub timing: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            iterations: 4,
            examples_per_iteration: 2,
            e2e: E2eConfig { parallel: 1, ..E2eConfig::default() },
            parallel: std::thread::available_parallelism().map_or(1, |n| n.get()),
            timing: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Round {
    pub iteration: usize,
    pub candidates: Vec<String>,
    pub timed_out: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ms: Option<u64>,
    /// The top candidate, when it was wrong and examples were added against it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rejected: Option<String>,
    pub added_positives: Vec<String>,
    pub added_negatives: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkReport {
    pub id: String,
    pub solved: bool,
    /// Iteration whose results contained the intended regex.
    pub solved_at: Option<usize>,
    /// Refinement rounds used.
    pub iterations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regex: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ms: Option<u64>,
    pub rounds: Vec<Round>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub iterations: usize,
    pub examples_per_iteration: usize,
    pub top_k: usize,
    pub benchmarks: Vec<BenchmarkReport>,
    /// Benchmarks left out for lack of a ground truth.
    pub skipped: Vec<String>,
    /// Entry `i`: benchmarks solved within `i` refinement rounds.
    pub solved_per_iteration: Vec<usize>,
    /// Entry `i`: mean time to solution over the benchmarks counted in
    /// `solved_per_iteration[i]`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_ms_per_solved: Option<Vec<Option<f64>>>,
    /// Added examples that the rejected candidate classified correctly.
    pub violations: usize,
}

fn literal(s: &str) -> Regex {
    s.chars().map(Regex::literal).reduce(|a, b| Regex::binary(BinaryOp::Concat, a, b)).unwrap_or(Regex::Epsilon)
}

/// Up to `n` distinct strings on which `a` and `b` disagree, shortest first.
pub fn distinguishing_strings(a: &Regex, b: &Regex, n: usize) -> Result<Vec<String>, AutomatonError> {
    let xor = Regex::binary(
        BinaryOp::Or,
        Regex::binary(BinaryOp::And, a.clone(), Regex::not(b.clone())),
        Regex::binary(BinaryOp::And, b.clone(), Regex::not(a.clone())),
    );
    let mut out: Vec<String> = Vec::new();
    let mut rest = xor;
    while out.len() < n {
        let Some(s) = distinguishing_string(&rest, &Regex::EmptySet)? else { break };
        rest = Regex::binary(BinaryOp::And, rest, Regex::not(literal(&s)));
        out.push(s);
    }
    Ok(out)
}

fn is_intended(r: &Regex, truth: &Regex) -> bool {
    equivalent(r, truth).unwrap_or_else(|e| {
        log::warn!("cannot compare {r} with {truth}: {e}");
        false
    })
}

/// The protocol for one benchmark with a ground truth.
pub fn run_one(b: &Loaded, truth: &Regex, grammar: &Grammar, model: &Model, cfg: &BenchConfig) -> (BenchmarkReport, usize) {
    let started = Instant::now();
    let mut ex = b.examples.clone();
    let mut rounds = Vec::new();
    let mut violations = 0;
    let mut report = BenchmarkReport { id: b.id().into(), solved: false, solved_at: None, iterations: 0, regex: None, ms: None, rounds: Vec::new() };
    for iteration in 0..=cfg.iterations {
        let t = Instant::now();
        let out = match &b.sketches {
            Some(s) => run_sketches(s.clone(), &ex, &cfg.e2e),
            None => run_description(b.bench.description.as_deref().unwrap_or(""), &ex, grammar, model, &cfg.e2e),
        };
        let mut round = Round {
            iteration,
            candidates: out.results.iter().map(|t| t.regex.to_string()).collect(),
            timed_out: out.timed_out,
            ms: cfg.timing.then(|| t.elapsed().as_millis() as u64),
            rejected: None,
            added_positives: Vec::new(),
            added_negatives: Vec::new(),
        };
        report.iterations = iteration;
        if let Some(hit) = out.results.iter().find(|t| is_intended(&t.regex, truth)) {
            report.solved = true;
            report.solved_at = Some(iteration);
            report.regex = Some(hit.regex.to_string());
            rounds.push(round);
            break;
        }
        let top = out.results.first().map(|t| t.regex.clone());
        let (Some(top), true) = (top, iteration < cfg.iterations) else {
            rounds.push(round);
            break;
        };
        let strings = distinguishing_strings(&top, truth, cfg.examples_per_iteration).unwrap_or_else(|e| {
            log::warn!("{}: no counterexample against {top}: {e}", b.id());
            Vec::new()
        });
        for s in strings {
            let wanted = is_match(truth, &s);
            if is_match(&top, &s) == wanted {
                violations += 1;
            }
            if wanted {
                round.added_positives.push(s);
            } else {
                round.added_negatives.push(s);
            }
        }
        round.rejected = Some(top.to_string());
        let stuck = round.added_positives.is_empty() && round.added_negatives.is_empty();
        if !stuck {
            let pos = ex.positives().iter().chain(&round.added_positives).cloned();
            let neg = ex.negatives().iter().chain(&round.added_negatives).cloned();
            ex = Examples::new(pos.collect::<Vec<_>>(), neg.collect::<Vec<_>>()).expect("counterexamples are new strings");
        }
        rounds.push(round);
        if stuck {
            break;
        }
    }
    report.rounds = rounds;
    report.ms = cfg.timing.then(|| started.elapsed().as_millis() as u64);
    (report, violations)
}

pub fn run_bench(benchmarks: &[Loaded], grammar: &Grammar, model: &Model, cfg: &BenchConfig) -> RunReport {
    let mut skipped = Vec::new();
    let mut work = Vec::new();
    for b in benchmarks {
        match &b.ground_truth {
            Some(t) => work.push((b, t)),
            None => {
                log::warn!("{}: no ground truth, skipped", b.id());
                skipped.push(b.id().to_string());
            }
        }
    }
    let results: Mutex<Vec<Option<(BenchmarkReport, usize)>>> = Mutex::new(vec![None; work.len()]);
    let next = AtomicUsize::new(0);
    let worker = || loop {
        let i = next.fetch_add(1, Ordering::SeqCst);
        let Some((b, truth)) = work.get(i) else { return };
        let r = run_one(b, truth, grammar, model, cfg);
        log::info!("{}: solved {:?}", b.id(), r.0.solved_at);
        results.lock().unwrap()[i] = Some(r);
    };
    std::thread::scope(|s| {
        for _ in 0..cfg.parallel.max(1) {
            s.spawn(worker);
        }
    });
    let (reports, violations): (Vec<BenchmarkReport>, Vec<usize>) = results.into_inner().unwrap().into_iter().flatten().unzip();

    let solved_per_iteration =
        (0..=cfg.iterations).map(|i| reports.iter().filter(|r| r.solved_at.is_some_and(|s| s <= i)).count()).collect();
    let mean_ms_per_solved = cfg.timing.then(|| {
        (0..=cfg.iterations)
            .map(|i| {
                let ms: Vec<u64> = reports
                    .iter()
                    .filter(|r| r.solved_at.is_some_and(|s| s <= i))
                    .map(|r| r.rounds.iter().filter_map(|x| x.ms).sum())
                    .collect();
                (!ms.is_empty()).then(|| ms.iter().sum::<u64>() as f64 / ms.len() as f64)
            })
            .collect()
    });
    RunReport {
        iterations: cfg.iterations,
        examples_per_iteration: cfg.examples_per_iteration,
        top_k: cfg.e2e.top_k,
        benchmarks: reports,
        skipped,
        solved_per_iteration,
        mean_ms_per_solved,
        violations: violations.iter().sum(),
    }
}

impl RunReport {
    /// A fixed-width table of the per-benchmark outcome and the solved curve.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let width = self.benchmarks.iter().map(|b| b.id.len()).max().unwrap_or(2).max(2);
        out += &format!("{:width$}  {:>6}  {:>8}  regex\n", "id", "solved", "ms");
        for b in &self.benchmarks {
            let at = b.solved_at.map_or("-".to_string(), |i| i.to_string());
            let ms = b.ms.map_or("-".to_string(), |m| m.to_string());
            out += &format!("{:width$}  {at:>6}  {ms:>8}  {}\n", b.id, b.regex.as_deref().unwrap_or("-"));
        }
        let curve: Vec<String> = self.solved_per_iteration.iter().map(|n| n.to_string()).collect();
        out += &format!("solved per iteration: {}\n", curve.join(" "));
        if self.violations > 0 {
            out += &format!("counterexample violations: {}\n", self.violations);
        }
        out
    }
}
