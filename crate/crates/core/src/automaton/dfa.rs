use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use super::nfa::{Builder, Nfa};
use super::{state_cap, AutomatonError, Partition};
use crate::regex::Regex;

/// A complete deterministic automaton. State 0 is the start state and a
/// dead state is explicit whenever one is needed.
#[derive(Debug, Clone)]
pub struct Dfa {
    partition: Arc<Partition>,
    trans: Vec<u32>,
    accepting: Vec<bool>,
    start: u32,
}

impl Dfa {
    /// Compiles `r` with the process-wide state cap.
    pub fn compile(r: &Regex) -> Result<Dfa, AutomatonError> {
        let partition = Arc::new(Partition::for_regexes(&[r]));
        Dfa::compile_over(r, partition, state_cap())
    }

    /// Compiles `r` over a given partition, which must refine every class
    /// occurring in `r`.
    pub fn compile_over(r: &Regex, partition: Arc<Partition>, cap: usize) -> Result<Dfa, AutomatonError> {
        let mut builder = Builder::new(&partition, cap);
        let (s, a) = builder.build(r)?;
        Dfa::determinize(&builder.nfa, s, a, partition.clone(), cap)
    }

    pub(crate) fn determinize(
        nfa: &Nfa,
        start: u32,
        accept: u32,
        partition: Arc<Partition>,
        cap: usize,
    ) -> Result<Dfa, AutomatonError> {
        let nb = partition.len();
        let mut seen = vec![false; nfa.len()];
        let mut index: HashMap<Vec<u32>, u32> = HashMap::new();
        let mut sets: Vec<Vec<u32>> = Vec::new();
        let mut trans: Vec<u32> = Vec::new();
        let mut accepting = Vec::new();

        let mut init = vec![start];
        nfa.closure(&mut init, &mut seen);
        index.insert(init.clone(), 0);
        accepting.push(init.binary_search(&accept).is_ok());
        sets.push(init);

        let mut next = 0usize;
        while next < sets.len() {
            let current = sets[next].clone();
            for b in 0..nb {
                let bit = 1u128 << b;
                let mut target: Vec<u32> = Vec::new();
                for &q in &current {
                    for &(mask, t) in &nfa.edges[q as usize] {
                        if mask & bit != 0 && !seen[t as usize] {
                            seen[t as usize] = true;
                            target.push(t);
                        }
                    }
                }
                for &t in &target {
                    seen[t as usize] = false;
                }
                nfa.closure(&mut target, &mut seen);
                let id = match index.get(&target) {
                    Some(&id) => id,
                    None => {
                        if sets.len() >= cap {
                            return Err(AutomatonError::StateLimit { cap });
                        }
                        let id = sets.len() as u32;
                        accepting.push(target.binary_search(&accept).is_ok());
                        index.insert(target.clone(), id);
                        sets.push(target);
                        id
                    }
                };
                trans.push(id);
            }
            next += 1;
        }
        Ok(Dfa { partition, trans, accepting, start: 0 })
    }

    pub fn partition(&self) -> &Arc<Partition> {
        &self.partition
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn num_blocks(&self) -> usize {
        self.partition.len()
    }

    pub fn start(&self) -> u32 {
        self.start
    }

    pub fn step(&self, state: u32, block: usize) -> u32 {
        self.trans[state as usize * self.num_blocks() + block]
    }

    pub fn is_accepting(&self, state: u32) -> bool {
        self.accepting[state as usize]
    }

    /// Whole-string membership. Bytes outside ASCII are never accepted.
    pub fn accepts(&self, s: &[u8]) -> bool {
        let mut q = self.start;
        for &b in s {
            match self.partition.block_of(b) {
                Some(block) => q = self.step(q, block),
                None => return false,
            }
        }
        self.is_accepting(q)
    }

    pub fn complement(mut self) -> Dfa {
        for a in &mut self.accepting {
            *a = !*a;
        }
        self
    }

    /// Product automaton; `accept` combines the acceptance of both sides.
    pub fn product(&self, other: &Dfa, accept: impl Fn(bool, bool) -> bool, cap: usize) -> Result<Dfa, AutomatonError> {
        if self.partition != other.partition {
            return Err(AutomatonError::PartitionMismatch);
        }
        let nb = self.num_blocks();
        let mut index: HashMap<(u32, u32), u32> = HashMap::new();
        let mut pairs = vec![(self.start, other.start)];
        index.insert((self.start, other.start), 0);
        let mut trans = Vec::new();
        let mut accepting = Vec::new();
        let mut next = 0;
        while next < pairs.len() {
            let (p, q) = pairs[next];
            accepting.push(accept(self.is_accepting(p), other.is_accepting(q)));
            for b in 0..nb {
                let key = (self.step(p, b), other.step(q, b));
                let id = match index.get(&key) {
                    Some(&id) => id,
                    None => {
                        if pairs.len() >= cap {
                            return Err(AutomatonError::StateLimit { cap });
                        }
                        let id = pairs.len() as u32;
                        index.insert(key, id);
                        pairs.push(key);
                        id
                    }
                };
                trans.push(id);
            }
            next += 1;
        }
        Ok(Dfa { partition: self.partition.clone(), trans, accepting, start: 0 })
    }

    /// States from which an accepting state is reachable.
    pub fn live_states(&self) -> Vec<bool> {
        let n = self.num_states();
        let nb = self.num_blocks();
        let mut preds: Vec<Vec<u32>> = vec![Vec::new(); n];
        for q in 0..n {
            for b in 0..nb {
                preds[self.trans[q * nb + b] as usize].push(q as u32);
            }
        }
        let mut live = self.accepting.clone();
        let mut stack: Vec<u32> = (0..n as u32).filter(|&q| live[q as usize]).collect();
        while let Some(q) = stack.pop() {
            for &p in &preds[q as usize] {
                if !live[p as usize] {
                    live[p as usize] = true;
                    stack.push(p);
                }
            }
        }
        live
    }

    pub fn is_empty(&self) -> bool {
        !self.live_states()[self.start as usize]
    }

    /// Shortest accepted string, lexicographically least among those.
    pub fn shortest_accepted(&self) -> Option<String> {
        let nb = self.num_blocks();
        let mut parent: Vec<Option<(u32, u8)>> = vec![None; self.num_states()];
        let mut visited = vec![false; self.num_states()];
        let mut queue = VecDeque::from([self.start]);
        visited[self.start as usize] = true;
        while let Some(q) = queue.pop_front() {
            if self.is_accepting(q) {
                let mut out = Vec::new();
                let mut cur = q;
                while let Some((p, c)) = parent[cur as usize] {
                    out.push(c);
                    cur = p;
                }
                out.reverse();
                return Some(String::from_utf8(out).expect("ASCII"));
            }
            // blocks are ordered by their smallest character
            for b in 0..nb {
                let t = self.step(q, b);
                if !visited[t as usize] {
                    visited[t as usize] = true;
                    let c = self.partition.blocks()[b].first().expect("blocks are non-empty");
                    parent[t as usize] = Some((q, c));
                    queue.push_back(t);
                }
            }
        }
        None
    }

    /// Encoding of the reachable part that does not depend on the alphabet
    /// partition or on state numbering. Minimal automata of equal languages
    /// have equal forms.
    pub fn canonical_form(&self) -> Vec<u32> {
        let blocks: Vec<Option<usize>> = (0u8..128).map(|c| self.partition.block_of(c)).collect();
        let mut ids = vec![u32::MAX; self.num_states()];
        let mut order = vec![self.start];
        ids[self.start as usize] = 0;
        let mut out = Vec::new();
        let mut i = 0;
        while i < order.len() {
            let q = order[i];
            out.push(u32::MAX - self.is_accepting(q) as u32);
            let mut last = u32::MAX;
            for (c, block) in blocks.iter().enumerate() {
                let Some(b) = block else { continue };
                let t = self.step(q, *b);
                if ids[t as usize] == u32::MAX {
                    ids[t as usize] = order.len() as u32;
                    order.push(t);
                }
                if ids[t as usize] != last {
                    last = ids[t as usize];
                    out.push(c as u32);
                    out.push(last);
                }
            }
            i += 1;
        }
        out
    }

    /// Minimal equivalent automaton (Hopcroft's partition refinement).
    pub fn minimize(self) -> Dfa {
        let n = self.num_states();
        let nb = self.num_blocks();
        // restrict to reachable states first
        let mut reach = vec![false; n];
        let mut order = vec![self.start];
        reach[self.start as usize] = true;
        let mut i = 0;
        while i < order.len() {
            let q = order[i];
            for b in 0..nb {
                let t = self.step(q, b);
                if !reach[t as usize] {
                    reach[t as usize] = true;
                    order.push(t);
                }
            }
            i += 1;
        }
        let mut inverse: Vec<Vec<Vec<u32>>> = vec![vec![Vec::new(); n]; nb];
        for &q in &order {
            for (b, inv) in inverse.iter_mut().enumerate() {
                inv[self.step(q, b) as usize].push(q);
            }
        }

        let mut class_of = vec![usize::MAX; n];
        let mut classes: Vec<Vec<u32>> = Vec::new();
        let (acc, rej): (Vec<u32>, Vec<u32>) = order.iter().partition(|&&q| self.is_accepting(q));
        for group in [acc, rej] {
            if !group.is_empty() {
                for &q in &group {
                    class_of[q as usize] = classes.len();
                }
                classes.push(group);
            }
        }
        let mut work: Vec<(usize, usize)> = Vec::new();
        for c in 0..classes.len() {
            for b in 0..nb {
                work.push((c, b));
            }
        }
        let mut in_work: Vec<Vec<bool>> = vec![vec![true; nb]; classes.len()];
        while let Some((splitter, b)) = work.pop() {
            in_work[splitter][b] = false;
            let mut touched: HashMap<usize, Vec<u32>> = HashMap::new();
            for &t in &classes[splitter] {
                for &p in &inverse[b][t as usize] {
                    touched.entry(class_of[p as usize]).or_default().push(p);
                }
            }
            let mut keys: Vec<usize> = touched.keys().copied().collect();
            keys.sort_unstable();
            for c in keys {
                let hit = &touched[&c];
                if hit.len() == classes[c].len() {
                    continue;
                }
                let mut hit_set = vec![];
                hit_set.extend_from_slice(hit);
                hit_set.sort_unstable();
                hit_set.dedup();
                if hit_set.len() == classes[c].len() {
                    continue;
                }
                let rest: Vec<u32> = classes[c].iter().copied().filter(|q| hit_set.binary_search(q).is_err()).collect();
                let new_id = classes.len();
                let (keep, moved) = if hit_set.len() <= rest.len() { (rest, hit_set) } else { (hit_set, rest) };
                for &q in &moved {
                    class_of[q as usize] = new_id;
                }
                classes[c] = keep;
                classes.push(moved);
                in_work.push(vec![false; nb]);
                // the moved half is the smaller one, so queueing it suffices
                for a in 0..nb {
                    in_work[new_id][a] = true;
                    work.push((new_id, a));
                }
            }
        }

        // renumber classes so that the start state comes first, in BFS order
        let mut renum = vec![u32::MAX; classes.len()];
        let mut count = 0u32;
        for &q in &order {
            let c = class_of[q as usize];
            if renum[c] == u32::MAX {
                renum[c] = count;
                count += 1;
            }
        }
        let mut trans = vec![0u32; count as usize * nb];
        let mut accepting = vec![false; count as usize];
        for &q in &order {
            let c = renum[class_of[q as usize]] as usize;
            accepting[c] = self.is_accepting(q);
            for b in 0..nb {
                trans[c * nb + b] = renum[class_of[self.step(q, b) as usize]];
            }
        }
        Dfa { partition: self.partition, trans, accepting, start: 0 }
    }
}
