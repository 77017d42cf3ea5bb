//! Natural language plus examples: one synthesis instance per parsed sketch.

use std::collections::HashSet;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use regel_core::nlp::{parse, Grammar, Model, ParseConfig};
use regel_core::regex::Regex;
use regel_core::sketch::HSketch;
use regel_core::synthesis::{default_palette, synthesize, Examples, SynthConfig, SynthResult};

#[derive(Debug, Clone)]
pub struct E2eConfig {
    pub parallel: usize,
    pub top_sketches: usize,
    pub timeout: Duration,
    pub top_k: usize,
    pub depth: u32,
    pub prune: bool,
    pub beam: usize,
}

impl Default for E2eConfig {
    fn default() -> Self {
        E2eConfig {
            parallel: std::thread::available_parallelism().map_or(1, |n| n.get()),
            top_sketches: 25,
            timeout: Duration::from_secs(60),
            top_k: 3,
            depth: regel_core::sketch::DEFAULT_DEPTH,
            prune: true,
            beam: regel_core::nlp::DEFAULT_BEAM,
        }
    }
}

/// A result and the sketch it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tagged {
    pub regex: Regex,
    pub sketch: HSketch,
    pub sketch_rank: usize,
}

#[derive(Debug, Clone, Default)]
pub struct E2eOutcome {
    pub results: Vec<Tagged>,
    /// Sketches in rank order; `sketches.len()` instances were eligible.
    pub sketches: Vec<HSketch>,
    /// Instances that actually ran.
    pub ran: usize,
    pub timed_out: bool,
    /// The parser produced nothing and a bare hole was used.
    pub fallback: bool,
}

/// A hole whose hints are the palette's classes: plain programming by example.
pub fn bare_hole(ex: &Examples) -> HSketch {
    let classes = default_palette(&HSketch::hole(Vec::new()), ex);
    HSketch::hole(classes.into_iter().map(|c| HSketch::concrete(Regex::Class(c))).collect())
}

/// The top `n` sketches for `description`, or a bare hole when there are none.
pub fn sketches_for(description: &str, ex: &Examples, grammar: &Grammar, model: &Model, cfg: &E2eConfig) -> (Vec<HSketch>, bool) {
    let pcfg = ParseConfig { beam: cfg.beam, limit: cfg.top_sketches };
    let sketches: Vec<HSketch> = parse(description, grammar, model, pcfg).into_iter().map(|c| c.sketch).take(cfg.top_sketches).collect();
    if sketches.is_empty() {
        (vec![bare_hole(ex)], true)
    } else {
        (sketches, false)
    }
}

pub fn run_description(description: &str, ex: &Examples, grammar: &Grammar, model: &Model, cfg: &E2eConfig) -> E2eOutcome {
    let (sketches, fallback) = sketches_for(description, ex, grammar, model, cfg);
    E2eOutcome { fallback, ..run_sketches(sketches, ex, cfg) }
}

/// Runs the sketches on a pool of `cfg.parallel` workers under one shared
/// budget. Results are merged in sketch rank order, so the output does not
/// depend on the pool size: work stops early only once a complete prefix of
/// the ranking already yields `top_k` distinct regexes.
pub fn run_sketches(sketches: Vec<HSketch>, ex: &Examples, cfg: &E2eConfig) -> E2eOutcome {
    let deadline = Instant::now() + cfg.timeout;
    let slots: Mutex<Vec<Option<SynthResult>>> = Mutex::new(vec![None; sketches.len()]);
    let next = AtomicUsize::new(0);
    let stop = AtomicBool::new(false);
    let ran = AtomicUsize::new(0);

    let worker = || loop {
        let i = next.fetch_add(1, Ordering::SeqCst);
        if i >= sketches.len() || stop.load(Ordering::SeqCst) {
            return;
        }
        let left = deadline.saturating_duration_since(Instant::now());
        if left.is_zero() {
            return;
        }
        let scfg = SynthConfig { depth: cfg.depth, top_k: cfg.top_k, prune: cfg.prune, timeout: Some(left), ..Default::default() };
        let res = synthesize(&sketches[i], ex, &scfg);
        ran.fetch_add(1, Ordering::SeqCst);
        let mut slots = slots.lock().unwrap();
        slots[i] = Some(res);
        let prefix = slots.iter().take_while(|s| s.is_some()).flatten();
        let distinct: HashSet<&Regex> = prefix.flat_map(|r| &r.regexes).collect();
        if distinct.len() >= cfg.top_k {
            stop.store(true, Ordering::SeqCst);
        }
    };
    std::thread::scope(|s| {
        for _ in 0..cfg.parallel.max(1) {
            s.spawn(worker);
        }
    });

    let slots = slots.into_inner().unwrap();
    let mut out = E2eOutcome { ran: ran.into_inner(), ..Default::default() };
    let mut seen = HashSet::new();
    for (rank, slot) in slots.iter().enumerate() {
        match slot {
            Some(res) => {
                out.timed_out |= res.stats.timed_out;
                for r in &res.regexes {
                    if out.results.len() < cfg.top_k && seen.insert(r.clone()) {
                        out.results.push(Tagged { regex: r.clone(), sketch: sketches[rank].clone(), sketch_rank: rank });
                    }
                }
            }
            None if !stop.load(Ordering::SeqCst) => out.timed_out = true,
            None => {}
        }
    }
    out.sketches = sketches;
    out
}
