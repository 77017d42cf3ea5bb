use std::fmt;

use smallvec::{smallvec, SmallVec};

type Parts = SmallVec<[(u64, Option<u64>); 2]>;

/// A set of natural numbers stored as sorted, disjoint, non-adjacent
/// intervals. `hi == None` means unbounded.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LenSet {
    parts: Parts,
}

fn le(a: Option<u64>, b: Option<u64>) -> bool {
    match (a, b) {
        (_, None) => true,
        (None, Some(_)) => false,
        (Some(x), Some(y)) => x <= y,
    }
}

fn min_hi(a: Option<u64>, b: Option<u64>) -> Option<u64> {
    if le(a, b) {
        a
    } else {
        b
    }
}

fn max_hi(a: Option<u64>, b: Option<u64>) -> Option<u64> {
    if le(a, b) {
        b
    } else {
        a
    }
}

impl LenSet {
    pub fn empty() -> LenSet {
        LenSet { parts: SmallVec::new() }
    }

    pub fn all() -> LenSet {
        LenSet::at_least(0)
    }

    pub fn point(v: u64) -> LenSet {
        LenSet { parts: smallvec![(v, Some(v))] }
    }

    pub fn at_least(v: u64) -> LenSet {
        LenSet { parts: smallvec![(v, None)] }
    }

    pub fn at_most(v: u64) -> LenSet {
        LenSet { parts: smallvec![(0, Some(v))] }
    }

    pub fn interval(lo: u64, hi: Option<u64>) -> LenSet {
        if le(Some(lo), hi) {
            LenSet { parts: smallvec![(lo, hi)] }
        } else {
            LenSet::empty()
        }
    }

    fn normalize(mut parts: Parts) -> LenSet {
        parts.sort_by_key(|p| p.0);
        let mut out = Parts::new();
        for (lo, hi) in parts {
            if let Some(last) = out.last_mut() {
                let touches = match last.1 {
                    None => true,
                    Some(h) => lo <= h.saturating_add(1),
                };
                if touches {
                    last.1 = max_hi(last.1, hi);
                    continue;
                }
            }
            out.push((lo, hi));
        }
        LenSet { parts: out }
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn contains(&self, v: u64) -> bool {
        self.parts.iter().any(|&(lo, hi)| lo <= v && le(Some(v), hi))
    }

    pub fn min(&self) -> Option<u64> {
        self.parts.first().map(|p| p.0)
    }

    /// Supremum: `None` for the empty set, `Some(None)` when unbounded.
    pub fn sup(&self) -> Option<Option<u64>> {
        self.parts.last().map(|p| p.1)
    }

    pub fn union(&self, other: &LenSet) -> LenSet {
        let mut parts = self.parts.clone();
        parts.extend_from_slice(&other.parts);
        LenSet::normalize(parts)
    }

    pub fn intersect(&self, other: &LenSet) -> LenSet {
        let mut parts = Parts::new();
        for &(a, b) in &self.parts {
            for &(c, d) in &other.parts {
                let lo = a.max(c);
                let hi = min_hi(b, d);
                if le(Some(lo), hi) {
                    parts.push((lo, hi));
                }
            }
        }
        LenSet::normalize(parts)
    }

    /// `{a + b : a in self, b in other}`.
    pub fn add(&self, other: &LenSet) -> LenSet {
        let mut parts = Parts::new();
        for &(a, b) in &self.parts {
            for &(c, d) in &other.parts {
                let hi = match (b, d) {
                    (Some(x), Some(y)) => Some(x.saturating_add(y)),
                    _ => None,
                };
                parts.push((a.saturating_add(c), hi));
            }
        }
        LenSet::normalize(parts)
    }

    /// Interval hull of `{a * k : a in self, lo <= k <= hi}`; exact when the
    /// factor is the single value one.
    pub fn scale(&self, lo: u64, hi: u64) -> LenSet {
        if self.is_empty() {
            return LenSet::empty();
        }
        if lo == 1 && hi == 1 {
            return self.clone();
        }
        let min = self.min().unwrap().saturating_mul(lo);
        let sup = self.sup().unwrap().map(|s| s.saturating_mul(hi));
        LenSet::interval(min, sup)
    }
}

impl fmt::Display for LenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "{{}}");
        }
        for (i, (lo, hi)) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, " u ")?;
            }
            match hi {
                Some(h) => write!(f, "[{lo},{h}]")?,
                None => write!(f, "[{lo},inf)")?,
            }
        }
        Ok(())
    }
}
