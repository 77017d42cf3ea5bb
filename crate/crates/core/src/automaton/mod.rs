//! Finite automata over a partitioned ASCII alphabet.
//!
//! Regexes compile to a Thompson NFA and are then determinised. `And` and
//! `Not` are handled by determinising their operands and taking a product or
//! a complement, which is why every construction is bounded by a state cap.

mod dfa;
mod nfa;
mod partition;

pub use dfa::Dfa;
pub use partition::Partition;

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use thiserror::Error;

use crate::regex::Regex;

pub const DEFAULT_STATE_CAP: usize = 50_000;

static STATE_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_STATE_CAP);

/// Sets the process-wide state cap used by [`Dfa::compile`].
pub fn set_state_cap(cap: usize) {
    STATE_CAP.store(cap.max(1), Ordering::Relaxed);
}

pub fn state_cap() -> usize {
    STATE_CAP.load(Ordering::Relaxed)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomatonError {
    #[error("automaton construction exceeded the cap of {cap} states")]
    StateLimit { cap: usize },
    #[error("automata are defined over different alphabet partitions")]
    PartitionMismatch,
}

fn shared_partition(r1: &Regex, r2: &Regex) -> Arc<Partition> {
    Arc::new(Partition::for_regexes(&[r1, r2]))
}

/// True iff `r1` and `r2` denote the same language.
pub fn equivalent(r1: &Regex, r2: &Regex) -> Result<bool, AutomatonError> {
    Ok(distinguishing_string(r1, r2)?.is_none())
}

/// A shortest string accepted by exactly one of `r1`, `r2`.
///
/// Among shortest strings the lexicographically smallest one is returned.
pub fn distinguishing_string(r1: &Regex, r2: &Regex) -> Result<Option<String>, AutomatonError> {
    let partition = shared_partition(r1, r2);
    let cap = state_cap();
    let a = Dfa::compile_over(r1, partition.clone(), cap)?.minimize();
    let b = Dfa::compile_over(r2, partition, cap)?.minimize();
    let xor = a.product(&b, |x, y| x != y, cap)?;
    Ok(xor.shortest_accepted())
}

/// Key identifying the language of `r`: two regexes get equal keys iff they
/// are equivalent.
pub fn language_key(r: &Regex) -> Result<Vec<u32>, AutomatonError> {
    Ok(Dfa::compile(r)?.minimize().canonical_form())
}

/// Emptiness of a compiled automaton.
pub fn is_empty(dfa: &Dfa) -> bool {
    dfa.is_empty()
}
