//! Hierarchical sketches: regex templates with depth-bounded holes.
//!
//! A hole `?d{S1,...,Sn}` stands for any regex of depth at most `d` that
//! has an instantiation of some hint `Si` at a leaf position. Holes written
//! without a depth take it from the synthesis configuration.

mod enumerate;
mod syntax;

pub use enumerate::{all_classes, enumerate, enumerate_with, EnumerateError, ENUMERATE_CAP};
pub use syntax::{parse_sketch, print_sketch};

use std::fmt;

use crate::regex::{BinaryOp, CharClass, Regex, Repetition, UnaryOp};

/// Depth given to holes that do not carry one.
pub const DEFAULT_DEPTH: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymId(pub u32);

impl fmt::Display for SymId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k{}", self.0)
    }
}

/// An integer argument that is either fixed or symbolic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IntSlot {
    Const(u32),
    Sym(SymId),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hole {
    pub depth: Option<u32>,
    pub hints: Vec<HSketch>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HSketch {
    Hole(Hole),
    Unary(UnaryOp, Box<HSketch>),
    Binary(BinaryOp, Box<HSketch>, Box<HSketch>),
    Repeat(Box<HSketch>, Repetition<IntSlot>),
    Concrete(Regex),
}

impl HSketch {
    /// A hole without an explicit depth.
    pub fn hole(hints: Vec<HSketch>) -> HSketch {
        HSketch::Hole(Hole { depth: None, hints })
    }

    pub fn hole_d(depth: u32, hints: Vec<HSketch>) -> HSketch {
        HSketch::Hole(Hole { depth: Some(depth), hints })
    }

    /// Builds an operator node, collapsing it to a concrete regex when all
    /// children are concrete.
    pub fn unary(op: UnaryOp, s: HSketch) -> HSketch {
        match s {
            HSketch::Concrete(r) => HSketch::Concrete(Regex::unary(op, r)),
            s => HSketch::Unary(op, Box::new(s)),
        }
    }

    pub fn binary(op: BinaryOp, a: HSketch, b: HSketch) -> HSketch {
        match (a, b) {
            (HSketch::Concrete(x), HSketch::Concrete(y)) => HSketch::Concrete(Regex::binary(op, x, y)),
            (a, b) => HSketch::Binary(op, Box::new(a), Box::new(b)),
        }
    }

    pub fn repeat(s: HSketch, rep: Repetition<IntSlot>) -> HSketch {
        let consts: Option<Vec<u32>> = rep
            .ints()
            .into_iter()
            .map(|i| match i {
                IntSlot::Const(c) => Some(c),
                IntSlot::Sym(_) => None,
            })
            .collect();
        match (s, consts) {
            (HSketch::Concrete(r), Some(ints)) => {
                HSketch::Concrete(Regex::Repeat(Box::new(r), Repetition::from_op(rep.op(), &ints).unwrap()))
            }
            (s, _) => HSketch::Repeat(Box::new(s), rep),
        }
    }

    pub fn concrete(r: Regex) -> HSketch {
        HSketch::Concrete(r)
    }

    pub fn is_concrete(&self) -> bool {
        matches!(self, HSketch::Concrete(_))
    }

    /// Gives every depth-less hole the depth `d`.
    pub fn with_depth(&self, d: u32) -> HSketch {
        match self {
            HSketch::Hole(h) => HSketch::Hole(Hole {
                depth: Some(h.depth.unwrap_or(d)),
                hints: h.hints.iter().map(|s| s.with_depth(d)).collect(),
            }),
            HSketch::Unary(op, s) => HSketch::Unary(*op, Box::new(s.with_depth(d))),
            HSketch::Binary(op, a, b) => HSketch::Binary(*op, Box::new(a.with_depth(d)), Box::new(b.with_depth(d))),
            HSketch::Repeat(s, rep) => HSketch::Repeat(Box::new(s.with_depth(d)), *rep),
            HSketch::Concrete(r) => HSketch::Concrete(r.clone()),
        }
    }

    /// Character classes mentioned anywhere in the sketch.
    pub fn classes(&self, out: &mut Vec<CharClass>) {
        match self {
            HSketch::Hole(h) => h.hints.iter().for_each(|s| s.classes(out)),
            HSketch::Unary(_, s) | HSketch::Repeat(s, _) => s.classes(out),
            HSketch::Binary(_, a, b) => {
                a.classes(out);
                b.classes(out);
            }
            HSketch::Concrete(r) => r.classes(out),
        }
    }

    /// Symbolic integers in preorder.
    pub fn syms(&self, out: &mut Vec<SymId>) {
        match self {
            HSketch::Hole(h) => h.hints.iter().for_each(|s| s.syms(out)),
            HSketch::Unary(_, s) => s.syms(out),
            HSketch::Binary(_, a, b) => {
                a.syms(out);
                b.syms(out);
            }
            HSketch::Repeat(s, rep) => {
                s.syms(out);
                for i in rep.ints() {
                    if let IntSlot::Sym(k) = i {
                        out.push(k);
                    }
                }
            }
            HSketch::Concrete(_) => {}
        }
    }

    /// Canonical form used to compare sketch labels: hints sorted by their
    /// printed text and deduplicated, symbolic ids renumbered in preorder.
    pub fn normalized(&self) -> HSketch {
        fn go(s: &HSketch) -> HSketch {
            match s {
                HSketch::Hole(h) => {
                    let mut hints: Vec<HSketch> = h.hints.iter().map(go).collect();
                    hints.sort_by_cached_key(|x| x.to_string());
                    hints.dedup();
                    HSketch::Hole(Hole { depth: h.depth, hints })
                }
                HSketch::Unary(op, a) => HSketch::Unary(*op, Box::new(go(a))),
                HSketch::Binary(op, a, b) => HSketch::Binary(*op, Box::new(go(a)), Box::new(go(b))),
                HSketch::Repeat(a, rep) => HSketch::Repeat(Box::new(go(a)), *rep),
                HSketch::Concrete(r) => HSketch::Concrete(r.clone()),
            }
        }
        go(self).renumbered()
    }

    /// Renumbers symbolic integers 0, 1, ... in preorder.
    pub fn renumbered(&self) -> HSketch {
        fn go(s: &HSketch, next: &mut u32) -> HSketch {
            match s {
                HSketch::Hole(h) => HSketch::Hole(Hole {
                    depth: h.depth,
                    hints: h.hints.iter().map(|x| go(x, next)).collect(),
                }),
                HSketch::Unary(op, a) => HSketch::Unary(*op, Box::new(go(a, next))),
                HSketch::Binary(op, a, b) => {
                    let a = go(a, next);
                    HSketch::Binary(*op, Box::new(a), Box::new(go(b, next)))
                }
                HSketch::Repeat(a, rep) => {
                    let a = go(a, next);
                    let rep = rep.map(|slot| match slot {
                        IntSlot::Const(c) => IntSlot::Const(c),
                        IntSlot::Sym(_) => {
                            *next += 1;
                            IntSlot::Sym(SymId(*next - 1))
                        }
                    });
                    HSketch::Repeat(Box::new(a), rep)
                }
                HSketch::Concrete(r) => HSketch::Concrete(r.clone()),
            }
        }
        go(self, &mut 0)
    }
}

impl fmt::Display for HSketch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HSketch::Hole(h) => {
                match h.depth {
                    Some(d) => write!(f, "?{d}{{")?,
                    None => write!(f, "?{{")?,
                }
                for (i, s) in h.hints.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{s}")?;
                }
                write!(f, "}}")
            }
            HSketch::Unary(op, s) => write!(f, "{}({s})", op.name()),
            HSketch::Binary(op, a, b) => write!(f, "{}({a},{b})", op.name()),
            HSketch::Repeat(s, rep) => {
                write!(f, "{}({s}", rep.op().name())?;
                for slot in rep.ints() {
                    match slot {
                        IntSlot::Const(c) => write!(f, ",{c}")?,
                        IntSlot::Sym(_) => write!(f, ",?")?,
                    }
                }
                write!(f, ")")
            }
            HSketch::Concrete(r) => write!(f, "{r}"),
        }
    }
}

/// Hint set of a hole, optionally extended with every character class.
#[derive(Clone, Copy)]
struct Hints<'a> {
    hints: &'a [HSketch],
    classes: bool,
}

/// Whether `r` belongs to the language of `s`. Holes without a depth use
/// [`DEFAULT_DEPTH`].
pub fn member(r: &Regex, s: &HSketch) -> bool {
    match s {
        HSketch::Concrete(c) => r == c,
        HSketch::Unary(op, a) => matches!(r, Regex::Unary(rop, ra) if rop == op && member(ra, a)),
        HSketch::Binary(op, a, b) => {
            matches!(r, Regex::Binary(rop, ra, rb) if rop == op && member(ra, a) && member(rb, b))
        }
        HSketch::Repeat(a, rep) => match r {
            Regex::Repeat(ra, rrep) if rrep.op() == rep.op() => {
                rep.ints().iter().zip(rrep.ints()).all(|(slot, k)| match slot {
                    IntSlot::Const(c) => *c == k,
                    IntSlot::Sym(_) => k >= 1,
                }) && member(ra, a)
            }
            _ => false,
        },
        HSketch::Hole(h) => member_hole(r, h.depth.unwrap_or(DEFAULT_DEPTH), Hints { hints: &h.hints, classes: false }),
    }
}

fn member_hole(r: &Regex, d: u32, h: Hints<'_>) -> bool {
    if h.classes && matches!(r, Regex::Class(_)) {
        return true;
    }
    if h.hints.iter().any(|s| member(r, s)) {
        return true;
    }
    if d <= 1 {
        return false;
    }
    let sibling = Hints { hints: h.hints, classes: true };
    match r {
        Regex::Unary(_, a) | Regex::Repeat(a, _) => member_hole(a, d - 1, h),
        Regex::Binary(_, a, b) => {
            (member_hole(a, d - 1, h) && member_hole(b, d - 1, sibling))
                || (member_hole(a, d - 1, sibling) && member_hole(b, d - 1, h))
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regex::parse_regex;

    fn re(s: &str) -> Regex {
        parse_regex(s).unwrap()
    }

    fn sk(s: &str) -> HSketch {
        parse_sketch(s).unwrap()
    }

    #[test]
    fn membership_example() {
        let s = sk("Concat(?1{<,>,<num>},?2{<,>,RepeatRange(<num>,1,3)})");
        assert!(member(&re("Concat(<num>,Contains(<,>))"), &s));
        assert!(!member(&re("Concat(<let>,Contains(<,>))"), &s));
    }

    #[test]
    fn membership_basics() {
        let r = re("Concat(<num>,<let>)");
        assert!(member(&r, &HSketch::Concrete(r.clone())));
        assert!(!member(&re("Repeat(<let>,2)"), &sk("?1{<num>}")));
        assert!(member(&re("Repeat(<num>,7)"), &sk("Repeat(?1{<num>},?)")));
        assert!(!member(&re("RepeatAtLeast(<num>,7)"), &sk("Repeat(?1{<num>},?)")));
    }

    #[test]
    fn siblings_may_be_classes() {
        let s = sk("?2{<num>}");
        assert!(member(&re("Concat(<a>,<num>)"), &s));
        assert!(member(&re("Or(<num>,<num>)"), &s));
        assert!(!member(&re("Concat(<a>,<b>)"), &s));
        assert!(!member(&re("Concat(<num>,Concat(<a>,<b>))"), &s));
        assert!(member(&re("Concat(<num>,Concat(<a>,<b>))"), &sk("?3{<num>}")));
    }

    #[test]
    fn depth_monotone() {
        let r = re("Concat(<num>,<a>)");
        assert!(member(&r, &sk("?2{<num>}")));
        assert!(member(&r, &sk("?3{<num>}")));
    }

    #[test]
    fn normalization_sorts_hints() {
        assert_eq!(sk("?{<num>,<,>,<num>}").normalized(), sk("?{<,>,<num>}").normalized());
    }
}
