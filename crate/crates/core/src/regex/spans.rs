//! Direct evaluation of regexes over all substrings of a string.
//!
//! For a string `s` of length `n`, a [`SpanTable`] records for every start
//! `i` the set of ends `j` such that `s[i..j]` is in the language. Every
//! operator of the DSL, `And` and `Not` included, is a cheap bitwise
//! transformation of its children's tables, which makes this evaluator the
//! workhorse for checking many candidate regexes against a fixed example
//! set.

use std::collections::HashMap;
use std::sync::Arc;

use super::{BinaryOp, Regex, Repetition, UnaryOp};

/// Longest string the table representation supports.
pub const MAX_SPAN_LEN: usize = 127;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanTable {
    rows: Vec<u128>,
}

impl SpanTable {
    fn len(&self) -> usize {
        self.rows.len() - 1
    }

    /// True iff the whole string is matched.
    pub fn whole(&self) -> bool {
        let n = self.len();
        self.rows[0] >> n & 1 == 1
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        j <= self.len() && self.rows[i] >> j & 1 == 1
    }
}

fn from(i: usize, n: usize) -> u128 {
    // bits i..=n
    let upto = if n + 1 >= 128 { u128::MAX } else { (1u128 << (n + 1)) - 1 };
    upto & !((1u128 << i) - 1)
}

fn compose(x: &[u128], y: &[u128]) -> Vec<u128> {
    x.iter()
        .map(|&row| {
            let mut out = 0u128;
            let mut bits = row;
            while bits != 0 {
                let k = bits.trailing_zeros() as usize;
                out |= y[k];
                bits &= bits - 1;
            }
            out
        })
        .collect()
}

fn star(a: &[u128]) -> Vec<u128> {
    let n = a.len() - 1;
    let mut out = vec![0u128; n + 1];
    for i in (0..=n).rev() {
        let mut row = 1u128 << i;
        let mut bits = a[i] & !(1u128 << i);
        while bits != 0 {
            let k = bits.trailing_zeros() as usize;
            row |= out[k];
            bits &= bits - 1;
        }
        out[i] = row;
    }
    out
}

fn power(a: &[u128], k: u32) -> Vec<u128> {
    let n = a.len() - 1;
    let mut acc: Vec<u128> = (0..=n).map(|i| 1u128 << i).collect();
    for _ in 0..k {
        let next = compose(&acc, a);
        if next == acc {
            break;
        }
        acc = next;
    }
    acc
}

fn suffix_union(a: &[u128]) -> Vec<u128> {
    let mut out = a.to_vec();
    for i in (0..out.len().saturating_sub(1)).rev() {
        out[i] |= out[i + 1];
    }
    out
}

fn at_least_min(rows: &[u128], n: usize) -> Vec<u128> {
    rows.iter()
        .map(|&row| if row == 0 { 0 } else { from(row.trailing_zeros() as usize, n) })
        .collect()
}

/// Evaluates `r` on `s` (at most [`MAX_SPAN_LEN`] bytes) without caching.
pub fn table(r: &Regex, s: &[u8]) -> SpanTable {
    assert!(s.len() <= MAX_SPAN_LEN, "string too long for span evaluation");
    SpanTable { rows: rows(r, s, &mut |_, _| None) }
}

fn rows(r: &Regex, s: &[u8], lookup: &mut dyn FnMut(&Regex, &[u8]) -> Option<Vec<u128>>) -> Vec<u128> {
    if let Some(hit) = lookup(r, s) {
        return hit;
    }
    let n = s.len();
    match r {
        Regex::Class(c) => (0..=n)
            .map(|i| if i < n && c.matches(s[i]) { 1u128 << (i + 1) } else { 0 })
            .collect(),
        Regex::Epsilon => (0..=n).map(|i| 1u128 << i).collect(),
        Regex::EmptySet => vec![0; n + 1],
        Regex::Unary(op, inner) => {
            let a = rows(inner, s, lookup);
            match op {
                UnaryOp::Not => a.iter().enumerate().map(|(i, &row)| !row & from(i, n)).collect(),
                UnaryOp::Optional => a.iter().enumerate().map(|(i, &row)| row | 1u128 << i).collect(),
                UnaryOp::KleeneStar => star(&a),
                UnaryOp::StartsWith => at_least_min(&a, n),
                UnaryOp::EndsWith => suffix_union(&a),
                UnaryOp::Contains => at_least_min(&suffix_union(&a), n)
                    .into_iter()
                    .enumerate()
                    .map(|(i, row)| row & from(i, n))
                    .collect(),
            }
        }
        Regex::Binary(op, x, y) => {
            let a = rows(x, s, lookup);
            let b = rows(y, s, lookup);
            match op {
                BinaryOp::Concat => compose(&a, &b),
                BinaryOp::Or => a.iter().zip(&b).map(|(p, q)| p | q).collect(),
                BinaryOp::And => a.iter().zip(&b).map(|(p, q)| p & q).collect(),
            }
        }
        Regex::Repeat(inner, rep) => {
            let a = rows(inner, s, lookup);
            match *rep {
                Repetition::Exactly(k) => exact_power(&a, k),
                Repetition::AtLeast(k) => compose(&exact_power(&a, k), &star(&a)),
                Repetition::Between(lo, hi) => {
                    let mut acc = exact_power(&a, lo);
                    let mut total = acc.clone();
                    for _ in lo..hi {
                        let next = compose(&acc, &a);
                        if next.iter().all(|&row| row == 0) {
                            break;
                        }
                        let grown: Vec<u128> = total.iter().zip(&next).map(|(p, q)| p | q).collect();
                        // once a power adds nothing new and repeats, later ones cannot either
                        if grown == total && next == acc {
                            break;
                        }
                        total = grown;
                        acc = next;
                    }
                    total
                }
            }
        }
    }
}

fn exact_power(a: &[u128], k: u32) -> Vec<u128> {
    if k == 0 {
        return power(a, 0);
    }
    let mut acc = a.to_vec();
    for _ in 1..k {
        acc = compose(&acc, a);
        if acc.iter().all(|&row| row == 0) {
            break;
        }
    }
    acc
}

/// Memoising evaluator over a fixed list of strings.
///
/// Sub-regexes shared between candidates are evaluated once. The cache is
/// cleared wholesale once it exceeds its capacity.
#[derive(Debug, Default)]
pub struct SpanMatcher {
    strings: Vec<Vec<u8>>,
    cache: HashMap<Regex, Arc<Vec<Vec<u128>>>>,
    capacity: usize,
}

impl SpanMatcher {
    pub fn new() -> Self {
        SpanMatcher { strings: Vec::new(), cache: HashMap::new(), capacity: 100_000 }
    }

    /// Panics if a string exceeds [`MAX_SPAN_LEN`]; callers route those
    /// through the automaton instead.
    pub fn for_strings<S: AsRef<[u8]>>(strings: &[S]) -> Self {
        let strings: Vec<Vec<u8>> = strings.iter().map(|s| s.as_ref().to_vec()).collect();
        assert!(strings.iter().all(|s| s.len() <= MAX_SPAN_LEN));
        SpanMatcher { strings, cache: HashMap::new(), capacity: 100_000 }
    }

    pub fn strings(&self) -> &[Vec<u8>] {
        &self.strings
    }

    /// Whole-string membership of each registered string.
    pub fn matches(&mut self, r: &Regex) -> Vec<bool> {
        let tables = self.tables(r);
        tables
            .iter()
            .zip(&self.strings)
            .map(|(rows, s)| rows[0] >> s.len() & 1 == 1)
            .collect()
    }

    /// Span rows of `r` for each registered string: bit `j` of row `i` is set
    /// iff `r` matches the substring from `i` to `j`.
    pub fn tables(&mut self, r: &Regex) -> Arc<Vec<Vec<u128>>> {
        if let Some(hit) = self.cache.get(r) {
            return hit.clone();
        }
        let result: Vec<Vec<u128>> = match r {
            Regex::Class(_) | Regex::Epsilon | Regex::EmptySet => {
                self.strings.iter().map(|s| rows(r, s, &mut |_, _| None)).collect()
            }
            _ => {
                // evaluate children through the cache, then combine
                let children: Vec<&Regex> = match r {
                    Regex::Unary(_, a) | Regex::Repeat(a, _) => vec![a],
                    Regex::Binary(_, a, b) => vec![a, b],
                    _ => unreachable!(),
                };
                let child_tables: Vec<Arc<Vec<Vec<u128>>>> = children.iter().map(|c| self.tables(c)).collect();
                (0..self.strings.len())
                    .map(|idx| {
                        let s = &self.strings[idx];
                        let mut lookup = |q: &Regex, _: &[u8]| {
                            children
                                .iter()
                                .position(|c| std::ptr::eq(*c, q))
                                .map(|pos| child_tables[pos][idx].clone())
                        };
                        rows(r, s, &mut lookup)
                    })
                    .collect()
            }
        };
        if self.cache.len() >= self.capacity {
            self.cache.clear();
        }
        let result = Arc::new(result);
        self.cache.insert(r.clone(), result.clone());
        result
    }

    /// Membership without the cache, for strings of any length.
    pub fn is_match_slow(&self, r: &Regex, s: &[u8]) -> bool {
        if s.len() <= MAX_SPAN_LEN {
            return table(r, s).whole();
        }
        let mut memo = HashMap::new();
        span_match(r, s, 0, s.len(), &mut memo)
    }
}

fn span_match(r: &Regex, s: &[u8], i: usize, j: usize, memo: &mut HashMap<(*const Regex, usize, usize), bool>) -> bool {
    let key = (r as *const Regex, i, j);
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let v = match r {
        Regex::Class(c) => j == i + 1 && c.matches(s[i]),
        Regex::Epsilon => i == j,
        Regex::EmptySet => false,
        Regex::Unary(op, a) => match op {
            UnaryOp::Not => !span_match(a, s, i, j, memo),
            UnaryOp::Optional => i == j || span_match(a, s, i, j, memo),
            UnaryOp::KleeneStar => i == j || (i + 1..=j).any(|k| span_match(a, s, i, k, memo) && span_match(r, s, k, j, memo)),
            UnaryOp::StartsWith => (i..=j).any(|k| span_match(a, s, i, k, memo)),
            UnaryOp::EndsWith => (i..=j).any(|k| span_match(a, s, k, j, memo)),
            UnaryOp::Contains => (i..=j).any(|a0| (a0..=j).any(|b0| span_match(a, s, a0, b0, memo))),
        },
        Regex::Binary(op, a, b) => match op {
            BinaryOp::Concat => (i..=j).any(|k| span_match(a, s, i, k, memo) && span_match(b, s, k, j, memo)),
            BinaryOp::Or => span_match(a, s, i, j, memo) || span_match(b, s, i, j, memo),
            BinaryOp::And => span_match(a, s, i, j, memo) && span_match(b, s, i, j, memo),
        },
        Regex::Repeat(a, rep) => {
            let (lo, hi) = rep.bounds();
            let hi = hi.map(|h| h as usize).unwrap_or(usize::MAX);
            // reach[k]: positions reachable from i using exactly `count` copies
            let mut reach = vec![false; j + 1];
            reach[i] = true;
            let mut found = lo == 0 && i == j;
            let mut count = 0usize;
            let limit = hi.min(lo as usize + (j - i) + 1);
            while count < limit {
                let mut next = vec![false; j + 1];
                for p in i..=j {
                    if reach[p] {
                        for q in p..=j {
                            if !next[q] && span_match(a, s, p, q, memo) {
                                next[q] = true;
                            }
                        }
                    }
                }
                count += 1;
                if count >= lo as usize && next[j] {
                    found = true;
                    break;
                }
                if next == reach || next.iter().all(|&x| !x) {
                    break;
                }
                reach = next;
            }
            found
        }
    };
    memo.insert(key, v);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regex::parse_regex;

    fn m(r: &str, s: &str) -> bool {
        table(&parse_regex(r).unwrap(), s.as_bytes()).whole()
    }

    #[test]
    fn containment_operators() {
        assert!(m("StartsWith(<a>)", "abc"));
        assert!(!m("StartsWith(<b>)", "abc"));
        assert!(m("EndsWith(<c>)", "abc"));
        assert!(m("Contains(<b>)", "abc"));
        assert!(!m("Contains(<d>)", "abc"));
        assert!(m("StartsWith(eps)", ""));
        assert!(m("Contains(Concat(<b>,<c>))", "abcd"));
    }

    #[test]
    fn repetition() {
        assert!(m("Repeat(<num>,3)", "123"));
        assert!(!m("Repeat(<num>,3)", "12"));
        assert!(m("RepeatAtLeast(<num>,2)", "1234"));
        assert!(!m("RepeatAtLeast(<num>,2)", "1"));
        assert!(m("RepeatRange(<num>,1,3)", "12"));
        assert!(!m("RepeatRange(<num>,1,3)", "1234"));
        assert!(m("KleeneStar(<a>)", ""));
        assert!(m("Repeat(Optional(<a>),3)", "a"));
    }

    #[test]
    fn logic() {
        assert!(m("Not(<a>)", "b"));
        assert!(m("Not(<a>)", ""));
        assert!(!m("And(<num>,<let>)", "a"));
        assert!(m("Or(<num>,<let>)", "a"));
    }

    #[test]
    fn memoised_agrees_with_direct() {
        let strings = ["123456789.123", "1.12345", "", ".1234"];
        let mut matcher = SpanMatcher::for_strings(&strings);
        let r = parse_regex("Concat(RepeatRange(<num>,1,15),Optional(Concat(<.>,RepeatRange(<num>,1,3))))").unwrap();
        assert_eq!(matcher.matches(&r), vec![true, false, false, false]);
        // second call hits the cache
        assert_eq!(matcher.matches(&r), vec![true, false, false, false]);
        for s in strings {
            assert_eq!(matcher.is_match_slow(&r, s.as_bytes()), table(&r, s.as_bytes()).whole());
        }
    }

    #[test]
    fn long_strings_use_recursive_fallback() {
        let s = "a".repeat(200);
        let r = parse_regex("RepeatAtLeast(<a>,150)").unwrap();
        assert!(SpanMatcher::new().is_match_slow(&r, s.as_bytes()));
        let r = parse_regex("And(Contains(<b>),KleeneStar(<a>))").unwrap();
        assert!(!SpanMatcher::new().is_match_slow(&r, s.as_bytes()));
    }
}
