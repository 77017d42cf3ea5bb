use thiserror::Error;

use super::approx::approximate;
use super::partial::PartialRegex;
use crate::regex::{Regex, SpanMatcher, MAX_SPAN_LEN};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExampleError {
    #[error("string {0:?} is both a positive and a negative example")]
    Contradictory(String),
    #[error("example {0:?} contains a non-ASCII character")]
    NonAscii(String),
}

/// Positive and negative examples; the two lists are disjoint.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Examples {
    positives: Vec<String>,
    negatives: Vec<String>,
}

impl Examples {
    pub fn new<P, N>(positives: P, negatives: N) -> Result<Examples, ExampleError>
    where
        P: IntoIterator,
        P::Item: Into<String>,
        N: IntoIterator,
        N::Item: Into<String>,
    {
        let positives: Vec<String> = positives.into_iter().map(Into::into).collect();
        let negatives: Vec<String> = negatives.into_iter().map(Into::into).collect();
        for s in positives.iter().chain(&negatives) {
            if !s.is_ascii() {
                return Err(ExampleError::NonAscii(s.clone()));
            }
        }
        if let Some(s) = positives.iter().find(|s| negatives.contains(s)) {
            return Err(ExampleError::Contradictory(s.clone()));
        }
        Ok(Examples { positives, negatives })
    }

    pub fn positives(&self) -> &[String] {
        &self.positives
    }

    pub fn negatives(&self) -> &[String] {
        &self.negatives
    }

    /// Length of the longest example, at least one.
    pub fn max_len(&self) -> u32 {
        self.positives.iter().chain(&self.negatives).map(|s| s.len() as u32).max().unwrap_or(0).max(1)
    }
}

struct Side {
    short: SpanMatcher,
    long: Vec<Vec<u8>>,
}

impl Side {
    fn new(strings: &[String]) -> Side {
        let (short, long): (Vec<&String>, Vec<&String>) = strings.iter().partition(|s| s.len() <= MAX_SPAN_LEN);
        Side {
            short: SpanMatcher::for_strings(&short),
            long: long.into_iter().map(|s| s.as_bytes().to_vec()).collect(),
        }
    }

    fn all(&mut self, r: &Regex) -> bool {
        self.short.matches(r).into_iter().all(|b| b) && self.long.iter().all(|s| self.short.is_match_slow(r, s))
    }

    fn any(&mut self, r: &Regex) -> bool {
        self.short.matches(r).into_iter().any(|b| b) || self.long.iter().any(|s| self.short.is_match_slow(r, s))
    }
}

/// Membership checks against a fixed example set, memoized per regex.
pub struct Checker {
    pos: Side,
    neg: Side,
    pub queries: u64,
}

impl Checker {
    pub fn new(ex: &Examples) -> Checker {
        Checker { pos: Side::new(&ex.positives), neg: Side::new(&ex.negatives), queries: 0 }
    }

    pub fn accepts_positives(&mut self, r: &Regex) -> bool {
        self.queries += 1;
        r.is_top() || self.pos.all(r)
    }

    pub fn rejects_negatives(&mut self, r: &Regex) -> bool {
        self.queries += 1;
        matches!(r, Regex::EmptySet) || !self.neg.any(r)
    }

    pub fn is_correct(&mut self, r: &Regex) -> bool {
        self.accepts_positives(r) && self.rejects_negatives(r)
    }

    /// Span tables of `r` over every example, or `None` if an example is too
    /// long for tables. Regexes with equal signatures behave identically on
    /// the examples in every context.
    pub fn signature(&mut self, r: &Regex) -> Option<Vec<u128>> {
        if !self.pos.long.is_empty() || !self.neg.long.is_empty() {
            return None;
        }
        let mut out = Vec::new();
        for side in [&mut self.pos, &mut self.neg] {
            for rows in side.short.tables(r).iter() {
                out.extend_from_slice(rows);
            }
        }
        Some(out)
    }

    /// True if no completion of `p` can agree with the examples.
    pub fn infeasible(&mut self, p: &PartialRegex) -> bool {
        let pair = approximate(p);
        !self.accepts_positives(&pair.over) || !self.rejects_negatives(&pair.under)
    }
}

pub fn is_correct(r: &Regex, ex: &Examples) -> bool {
    Checker::new(ex).is_correct(r)
}

pub fn infeasible(p: &PartialRegex, ex: &Examples) -> bool {
    Checker::new(ex).infeasible(p)
}
