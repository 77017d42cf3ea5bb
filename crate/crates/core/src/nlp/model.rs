use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::grammar::Grammar;
use super::parser::{parse, Features, ParseConfig, DEFAULT_BEAM};
use crate::sketch::HSketch;

const HEADER: &str = "regel-model v1";

/// Feature weights θ; an absent feature weighs 0.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Model {
    pub weights: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("not a model file (expected header {HEADER:?})")]
    Header,
    #[error("line {0}: expected `feature<TAB>weight`")]
    Line(usize),
}

impl Model {
    pub fn weight(&self, feature: &str) -> f64 {
        self.weights.get(feature).copied().unwrap_or(0.0)
    }

    pub fn score(&self, features: &Features) -> f64 {
        features.iter().map(|(f, v)| self.weight(f) * v).sum()
    }
}

/// Header line, then one `feature<TAB>weight` line per feature. Weights are
/// printed in shortest round-trip form.
impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{HEADER}")?;
        for (k, w) in &self.weights {
            writeln!(f, "{k}\t{w:?}")?;
        }
        Ok(())
    }
}

impl FromStr for Model {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Model, ModelError> {
        let mut lines = s.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == HEADER => {}
            _ => return Err(ModelError::Header),
        }
        let mut weights = BTreeMap::new();
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let (k, w) = line.rsplit_once('\t').ok_or(ModelError::Line(i + 1))?;
            let w: f64 = w.trim().parse().map_err(|_| ModelError::Line(i + 1))?;
            weights.insert(k.to_string(), w);
        }
        Ok(Model { weights })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub beam: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig { epochs: 5, learning_rate: 0.1, beam: DEFAULT_BEAM }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub model: Model,
    /// Negative log-likelihood of the labels, summed over the items of each
    /// epoch as they were visited.
    pub epoch_loss: Vec<f64>,
    /// Items whose label was not among the beam's root sketches at the start.
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TrainError {
    #[error("no item's labeled sketch is reachable by the grammar")]
    NothingToTrain,
}

/// Online gradient ascent on log Σ P(d) over root derivations whose sketch
/// equals the label, normalized over the beam's roots. Batch size 1.
pub fn train(data: &[(String, HSketch)], grammar: &Grammar, cfg: TrainConfig) -> Result<TrainReport, TrainError> {
    let pcfg = ParseConfig { beam: cfg.beam, limit: cfg.beam };
    let labels: Vec<HSketch> = data.iter().map(|(_, h)| h.normalized()).collect();
    let mut model = Model::default();
    let mut dropped = HashSet::new();
    let mut epoch_loss = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        let mut loss = 0.0;
        for (i, (utterance, _)) in data.iter().enumerate() {
            if dropped.contains(&i) {
                continue;
            }
            let roots = parse(utterance, grammar, &model, pcfg);
            let good: Vec<bool> = roots.iter().map(|c| c.sketch.normalized() == labels[i]).collect();
            let p_good: f64 = roots.iter().zip(&good).filter(|(_, g)| **g).map(|(c, _)| c.probability).sum();
            if p_good == 0.0 {
                if epoch == 0 {
                    log::warn!("skipping unreachable item {i}: {utterance:?}");
                    dropped.insert(i);
                }
                continue;
            }
            loss -= p_good.ln();
            // E[φ | good] - E[φ]
            let mut grad: BTreeMap<&str, f64> = BTreeMap::new();
            for (c, g) in roots.iter().zip(&good) {
                let w = if *g { c.probability / p_good } else { 0.0 } - c.probability;
                for (f, v) in &c.derivation.features {
                    *grad.entry(f).or_default() += w * v;
                }
            }
            for (f, g) in grad {
                if g != 0.0 {
                    *model.weights.entry(f.to_string()).or_default() += cfg.learning_rate * g;
                }
            }
        }
        log::info!("epoch {}: loss {loss:.4}", epoch + 1);
        epoch_loss.push(loss);
    }
    if cfg.epochs > 0 && dropped.len() == data.len() {
        return Err(TrainError::NothingToTrain);
    }
    Ok(TrainReport { model, epoch_loss, skipped: dropped.len() })
}
