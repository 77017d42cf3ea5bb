use std::collections::HashMap;
use std::sync::Arc;

use super::dfa::Dfa;
use super::{AutomatonError, Partition};
use crate::regex::{BinaryOp, CharClass, Regex, Repetition, UnaryOp};

/// Thompson NFA with edges labelled by sets of partition blocks.
#[derive(Debug, Default)]
pub(crate) struct Nfa {
    pub eps: Vec<Vec<u32>>,
    pub edges: Vec<Vec<(u128, u32)>>,
}

impl Nfa {
    pub fn len(&self) -> usize {
        self.eps.len()
    }

    fn state(&mut self) -> u32 {
        self.eps.push(Vec::new());
        self.edges.push(Vec::new());
        (self.eps.len() - 1) as u32
    }

    fn epsilon(&mut self, from: u32, to: u32) {
        self.eps[from as usize].push(to);
    }

    fn edge(&mut self, from: u32, mask: u128, to: u32) {
        if mask != 0 {
            self.edges[from as usize].push((mask, to));
        }
    }

    /// Sorted epsilon closure of `set`.
    pub fn closure(&self, set: &mut Vec<u32>, seen: &mut [bool]) {
        let mut stack: Vec<u32> = set.clone();
        for &s in set.iter() {
            seen[s as usize] = true;
        }
        while let Some(s) = stack.pop() {
            for &t in &self.eps[s as usize] {
                if !seen[t as usize] {
                    seen[t as usize] = true;
                    set.push(t);
                    stack.push(t);
                }
            }
        }
        for &s in set.iter() {
            seen[s as usize] = false;
        }
        set.sort_unstable();
    }
}

/// Builds NFA fragments for a regex, determinising `And`/`Not` operands.
pub(crate) struct Builder<'a> {
    pub nfa: Nfa,
    partition: &'a Arc<Partition>,
    cap: usize,
    dfas: HashMap<*const Regex, Dfa>,
}

impl<'a> Builder<'a> {
    pub fn new(partition: &'a Arc<Partition>, cap: usize) -> Self {
        Builder { nfa: Nfa::default(), partition, cap, dfas: HashMap::new() }
    }

    fn check(&self) -> Result<(), AutomatonError> {
        // fragments are copied for repetitions, so allow some slack over the DFA cap
        if self.nfa.len() > self.cap.saturating_mul(8) {
            Err(AutomatonError::StateLimit { cap: self.cap })
        } else {
            Ok(())
        }
    }

    /// Returns the (start, accept) states of a fresh fragment for `r`.
    pub fn build(&mut self, r: &Regex) -> Result<(u32, u32), AutomatonError> {
        self.check()?;
        match r {
            Regex::Class(c) => {
                let s = self.nfa.state();
                let a = self.nfa.state();
                let mask = self.partition.mask(*c);
                self.nfa.edge(s, mask, a);
                Ok((s, a))
            }
            Regex::Epsilon => {
                let s = self.nfa.state();
                let a = self.nfa.state();
                self.nfa.epsilon(s, a);
                Ok((s, a))
            }
            Regex::EmptySet => {
                let s = self.nfa.state();
                let a = self.nfa.state();
                Ok((s, a))
            }
            Regex::Unary(op, inner) => match op {
                UnaryOp::Not => {
                    let dfa = self.dfa(r, |b| Ok(b.sub_dfa(inner)?.complement()))?;
                    Ok(self.embed(&dfa))
                }
                UnaryOp::Optional => {
                    let (s, a) = self.build(inner)?;
                    self.nfa.epsilon(s, a);
                    Ok((s, a))
                }
                UnaryOp::KleeneStar => {
                    let (s1, a1) = self.build(inner)?;
                    Ok(self.star(s1, a1))
                }
                UnaryOp::StartsWith => {
                    let (s1, a1) = self.build(inner)?;
                    let (s2, a2) = self.sigma_star();
                    self.nfa.epsilon(a1, s2);
                    Ok((s1, a2))
                }
                UnaryOp::EndsWith => {
                    let (s1, a1) = self.sigma_star();
                    let (s2, a2) = self.build(inner)?;
                    self.nfa.epsilon(a1, s2);
                    Ok((s1, a2))
                }
                UnaryOp::Contains => {
                    let (s1, a1) = self.sigma_star();
                    let (s2, a2) = self.build(inner)?;
                    let (s3, a3) = self.sigma_star();
                    self.nfa.epsilon(a1, s2);
                    self.nfa.epsilon(a2, s3);
                    Ok((s1, a3))
                }
            },
            Regex::Binary(op, x, y) => match op {
                BinaryOp::Concat => {
                    let (s1, a1) = self.build(x)?;
                    let (s2, a2) = self.build(y)?;
                    self.nfa.epsilon(a1, s2);
                    Ok((s1, a2))
                }
                BinaryOp::Or => {
                    let (s1, a1) = self.build(x)?;
                    let (s2, a2) = self.build(y)?;
                    let s = self.nfa.state();
                    let a = self.nfa.state();
                    self.nfa.epsilon(s, s1);
                    self.nfa.epsilon(s, s2);
                    self.nfa.epsilon(a1, a);
                    self.nfa.epsilon(a2, a);
                    Ok((s, a))
                }
                BinaryOp::And => {
                    let cap = self.cap;
                    let dfa = self.dfa(r, |b| {
                        let left = b.sub_dfa(x)?;
                        let right = b.sub_dfa(y)?;
                        left.product(&right, |p, q| p && q, cap)
                    })?;
                    Ok(self.embed(&dfa))
                }
            },
            Regex::Repeat(inner, rep) => match *rep {
                Repetition::Exactly(k) => self.power(inner, k),
                Repetition::AtLeast(k) => {
                    let (s1, a1) = self.power(inner, k)?;
                    let (s2, a2) = self.build(inner)?;
                    let (s3, a3) = self.star(s2, a2);
                    self.nfa.epsilon(a1, s3);
                    Ok((s1, a3))
                }
                Repetition::Between(lo, hi) => {
                    let (s, mut a) = self.power(inner, lo)?;
                    // each optional copy may be skipped straight to the end
                    let end = self.nfa.state();
                    self.nfa.epsilon(a, end);
                    for _ in lo..hi {
                        let (s1, a1) = self.build(inner)?;
                        self.nfa.epsilon(a, s1);
                        self.nfa.epsilon(a1, end);
                        a = a1;
                    }
                    Ok((s, end))
                }
            },
        }
    }

    fn power(&mut self, r: &Regex, k: u32) -> Result<(u32, u32), AutomatonError> {
        let s = self.nfa.state();
        let mut a = s;
        for _ in 0..k {
            let (s1, a1) = self.build(r)?;
            self.nfa.epsilon(a, s1);
            a = a1;
        }
        Ok((s, a))
    }

    fn star(&mut self, s1: u32, a1: u32) -> (u32, u32) {
        let s = self.nfa.state();
        let a = self.nfa.state();
        self.nfa.epsilon(s, s1);
        self.nfa.epsilon(s, a);
        self.nfa.epsilon(a1, s1);
        self.nfa.epsilon(a1, a);
        (s, a)
    }

    fn sigma_star(&mut self) -> (u32, u32) {
        let s = self.nfa.state();
        let mask = self.partition.mask(CharClass::Any);
        self.nfa.edge(s, mask, s);
        (s, s)
    }

    fn sub_dfa(&mut self, r: &Regex) -> Result<Dfa, AutomatonError> {
        let mut sub = Builder::new(self.partition, self.cap);
        sub.dfas = std::mem::take(&mut self.dfas);
        let result = sub.build(r).and_then(|(s, a)| Dfa::determinize(&sub.nfa, s, a, self.partition.clone(), self.cap));
        self.dfas = sub.dfas;
        result
    }

    fn dfa(
        &mut self,
        r: &Regex,
        make: impl FnOnce(&mut Self) -> Result<Dfa, AutomatonError>,
    ) -> Result<Dfa, AutomatonError> {
        let key = r as *const Regex;
        if let Some(d) = self.dfas.get(&key) {
            return Ok(d.clone());
        }
        let d = make(self)?;
        self.dfas.insert(key, d.clone());
        Ok(d)
    }

    /// Copies the co-reachable part of a DFA into the NFA.
    fn embed(&mut self, dfa: &Dfa) -> (u32, u32) {
        let live = dfa.live_states();
        let base = self.nfa.len() as u32;
        for _ in 0..dfa.num_states() {
            self.nfa.state();
        }
        let accept = self.nfa.state();
        for q in 0..dfa.num_states() {
            if !live[q] {
                continue;
            }
            let mut by_target: Vec<(u32, u128)> = Vec::new();
            for b in 0..dfa.num_blocks() {
                let t = dfa.step(q as u32, b);
                if !live[t as usize] {
                    continue;
                }
                match by_target.iter_mut().find(|(x, _)| *x == t) {
                    Some((_, m)) => *m |= 1u128 << b,
                    None => by_target.push((t, 1u128 << b)),
                }
            }
            for (t, m) in by_target {
                self.nfa.edge(base + q as u32, m, base + t);
            }
            if dfa.is_accepting(q as u32) {
                self.nfa.epsilon(base + q as u32, accept);
            }
        }
        (base + dfa.start(), accept)
    }
}
