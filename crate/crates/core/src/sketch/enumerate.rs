use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use super::{HSketch, IntSlot, DEFAULT_DEPTH};
use crate::regex::{BinaryOp, CharClass, Regex, RepeatOp, Repetition, UnaryOp};

/// Largest result set [`enumerate`] will build.
pub const ENUMERATE_CAP: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerateError {
    #[error("sketch language exceeds {cap} regexes")]
    TooMany { cap: usize },
}

/// Every class of the DSL: the 128 literals and the named classes.
pub fn all_classes() -> Vec<CharClass> {
    (0u8..128).map(CharClass::Literal).chain(CharClass::NAMED).collect()
}

/// All members of `s` whose integer constants are at most `int_bound`.
pub fn enumerate(s: &HSketch, int_bound: u32) -> Result<BTreeSet<Regex>, EnumerateError> {
    enumerate_with(s, int_bound, &all_classes())
}

/// As [`enumerate`], with hole siblings drawn from `palette` instead of
/// every character class.
pub fn enumerate_with(s: &HSketch, int_bound: u32, palette: &[CharClass]) -> Result<BTreeSet<Regex>, EnumerateError> {
    let mut e = Enumerator { bound: int_bound, palette, memo: HashMap::new() };
    Ok(e.sketch(s)?.into_iter().collect())
}

struct Enumerator<'a> {
    bound: u32,
    palette: &'a [CharClass],
    memo: HashMap<(Vec<HSketch>, u32, bool), Vec<Regex>>,
}

impl Enumerator<'_> {
    fn guard(&self, n: usize) -> Result<(), EnumerateError> {
        if n > ENUMERATE_CAP {
            Err(EnumerateError::TooMany { cap: ENUMERATE_CAP })
        } else {
            Ok(())
        }
    }

    fn sketch(&mut self, s: &HSketch) -> Result<Vec<Regex>, EnumerateError> {
        match s {
            HSketch::Concrete(r) => Ok(vec![r.clone()]),
            HSketch::Unary(op, a) => Ok(self.sketch(a)?.into_iter().map(|r| Regex::unary(*op, r)).collect()),
            HSketch::Binary(op, a, b) => {
                let xs = self.sketch(a)?;
                let ys = self.sketch(b)?;
                self.guard(xs.len() * ys.len())?;
                Ok(xs
                    .iter()
                    .flat_map(|x| ys.iter().map(move |y| Regex::binary(*op, x.clone(), y.clone())))
                    .collect())
            }
            HSketch::Repeat(a, rep) => {
                let args = self.sketch(a)?;
                let slots: Vec<Vec<u32>> = rep
                    .ints()
                    .iter()
                    .map(|slot| match slot {
                        IntSlot::Const(c) => vec![*c],
                        IntSlot::Sym(_) => (1..=self.bound).collect(),
                    })
                    .collect();
                let mut out = Vec::new();
                for ints in cartesian(&slots) {
                    let rep = Repetition::from_op(rep.op(), &ints).unwrap();
                    if !rep.is_valid() {
                        continue;
                    }
                    for r in &args {
                        out.push(Regex::Repeat(Box::new(r.clone()), rep));
                    }
                    self.guard(out.len())?;
                }
                Ok(out)
            }
            HSketch::Hole(h) => self.hole(&h.hints, h.depth.unwrap_or(DEFAULT_DEPTH), false),
        }
    }

    fn hole(&mut self, hints: &[HSketch], d: u32, classes: bool) -> Result<Vec<Regex>, EnumerateError> {
        let key = (hints.to_vec(), d, classes);
        if let Some(hit) = self.memo.get(&key) {
            return Ok(hit.clone());
        }
        let mut out: BTreeSet<Regex> = BTreeSet::new();
        if classes {
            out.extend(self.palette.iter().map(|&c| Regex::Class(c)));
        }
        for s in hints {
            out.extend(self.sketch(s)?);
        }
        if d > 1 {
            let inner = self.hole(hints, d - 1, classes)?;
            let sibling = self.hole(hints, d - 1, true)?;
            for op in UnaryOp::ALL {
                out.extend(inner.iter().map(|r| Regex::unary(op, r.clone())));
            }
            self.guard(out.len() + 6 * inner.len() * sibling.len())?;
            for op in BinaryOp::ALL {
                for x in &inner {
                    for y in &sibling {
                        out.insert(Regex::binary(op, x.clone(), y.clone()));
                        out.insert(Regex::binary(op, y.clone(), x.clone()));
                    }
                }
            }
            for op in RepeatOp::ALL {
                let ranges: Vec<Vec<u32>> = vec![(1..=self.bound).collect(); op.int_arity()];
                for ints in cartesian(&ranges) {
                    let rep = Repetition::from_op(op, &ints).unwrap();
                    if !rep.is_valid() {
                        continue;
                    }
                    out.extend(inner.iter().map(|r| Regex::Repeat(Box::new(r.clone()), rep)));
                }
                self.guard(out.len())?;
            }
        }
        self.guard(out.len())?;
        let out: Vec<Regex> = out.into_iter().collect();
        self.memo.insert(key, out.clone());
        Ok(out)
    }
}

fn cartesian(slots: &[Vec<u32>]) -> Vec<Vec<u32>> {
    slots.iter().fold(vec![Vec::new()], |acc, choices| {
        acc.iter()
            .flat_map(|prefix| {
                choices.iter().map(move |&c| {
                    let mut v = prefix.clone();
                    v.push(c);
                    v
                })
            })
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sketch::{member, parse_sketch};

    #[test]
    fn small_sketches() {
        let s = parse_sketch("?1{<num>}").unwrap();
        assert_eq!(enumerate(&s, 3).unwrap().len(), 1);
        let s = parse_sketch("Repeat(?1{<a>},?)").unwrap();
        assert_eq!(enumerate(&s, 3).unwrap().len(), 3);
        let s = parse_sketch("<num>").unwrap();
        assert_eq!(enumerate(&s, 3).unwrap().into_iter().collect::<Vec<_>>(), vec![Regex::Class(CharClass::Num)]);
    }

    #[test]
    fn members_of_enumeration() {
        let s = parse_sketch("?2{<num>,<,>}").unwrap();
        let all = enumerate_with(&s, 2, &[CharClass::Num, CharClass::Let, CharClass::Literal(b',')]).unwrap();
        assert!(all.iter().all(|r| member(r, &s)));
        assert!(all.contains(&Regex::repeat_at_least(Regex::Class(CharClass::Num), 2)));
    }

    #[test]
    fn explosion_is_reported() {
        let s = parse_sketch("?4{<num>}").unwrap();
        assert!(matches!(enumerate(&s, 3), Err(EnumerateError::TooMany { .. })));
    }
}
