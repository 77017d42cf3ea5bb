//! The regex DSL: AST, concrete syntax, desugaring and matching.
//!
//! Matching is whole-string. `StartsWith`, `EndsWith` and `Contains` make
//! partial matching explicit, and `And`/`Not` are intersection and
//! complement over the 128-character ASCII alphabet.

mod class;
mod spans;
mod syntax;

pub use class::{CharClass, CharSet, ALPHABET_SIZE};
pub use spans::{SpanMatcher, SpanTable, MAX_SPAN_LEN};
pub use syntax::{parse_regex, OpName, ParseError, Parser as SyntaxParser};

use std::fmt;

/// Unary operators outside the `Repeat` family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UnaryOp {
    StartsWith,
    EndsWith,
    Contains,
    Not,
    Optional,
    KleeneStar,
}

/// Binary operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinaryOp {
    Concat,
    Or,
    And,
}

/// The `Repeat` operator family, without its integer arguments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RepeatOp {
    Repeat,
    RepeatAtLeast,
    RepeatRange,
}

impl UnaryOp {
    pub const ALL: [UnaryOp; 6] = [
        UnaryOp::StartsWith,
        UnaryOp::EndsWith,
        UnaryOp::Contains,
        UnaryOp::Not,
        UnaryOp::Optional,
        UnaryOp::KleeneStar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            UnaryOp::StartsWith => "StartsWith",
            UnaryOp::EndsWith => "EndsWith",
            UnaryOp::Contains => "Contains",
            UnaryOp::Not => "Not",
            UnaryOp::Optional => "Optional",
            UnaryOp::KleeneStar => "KleeneStar",
        }
    }
}

impl BinaryOp {
    pub const ALL: [BinaryOp; 3] = [BinaryOp::Concat, BinaryOp::Or, BinaryOp::And];

    pub fn name(self) -> &'static str {
        match self {
            BinaryOp::Concat => "Concat",
            BinaryOp::Or => "Or",
            BinaryOp::And => "And",
        }
    }

    pub fn is_commutative(self) -> bool {
        !matches!(self, BinaryOp::Concat)
    }
}

impl RepeatOp {
    pub const ALL: [RepeatOp; 3] = [RepeatOp::Repeat, RepeatOp::RepeatAtLeast, RepeatOp::RepeatRange];

    pub fn name(self) -> &'static str {
        match self {
            RepeatOp::Repeat => "Repeat",
            RepeatOp::RepeatAtLeast => "RepeatAtLeast",
            RepeatOp::RepeatRange => "RepeatRange",
        }
    }

    /// Number of integer arguments.
    pub fn int_arity(self) -> usize {
        match self {
            RepeatOp::RepeatRange => 2,
            _ => 1,
        }
    }
}

/// Integer arguments of a repetition.
///
/// Generic over the slot type so that sketches and partial regexes can
/// carry symbolic integers in the same positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Repetition<I = u32> {
    Exactly(I),
    AtLeast(I),
    Between(I, I),
}

impl<I: Copy> Repetition<I> {
    pub fn op(&self) -> RepeatOp {
        match self {
            Repetition::Exactly(_) => RepeatOp::Repeat,
            Repetition::AtLeast(_) => RepeatOp::RepeatAtLeast,
            Repetition::Between(..) => RepeatOp::RepeatRange,
        }
    }

    pub fn ints(&self) -> Vec<I> {
        match *self {
            Repetition::Exactly(k) | Repetition::AtLeast(k) => vec![k],
            Repetition::Between(a, b) => vec![a, b],
        }
    }

    pub fn map<J, F: FnMut(I) -> J>(&self, mut f: F) -> Repetition<J> {
        match *self {
            Repetition::Exactly(k) => Repetition::Exactly(f(k)),
            Repetition::AtLeast(k) => Repetition::AtLeast(f(k)),
            Repetition::Between(a, b) => {
                let a = f(a);
                Repetition::Between(a, f(b))
            }
        }
    }

    pub fn from_op(op: RepeatOp, ints: &[I]) -> Option<Repetition<I>> {
        match (op, ints) {
            (RepeatOp::Repeat, [k]) => Some(Repetition::Exactly(*k)),
            (RepeatOp::RepeatAtLeast, [k]) => Some(Repetition::AtLeast(*k)),
            (RepeatOp::RepeatRange, [a, b]) => Some(Repetition::Between(*a, *b)),
            _ => None,
        }
    }
}

impl Repetition<u32> {
    /// Smallest and (if bounded) largest number of copies.
    pub fn bounds(&self) -> (u32, Option<u32>) {
        match *self {
            Repetition::Exactly(k) => (k, Some(k)),
            Repetition::AtLeast(k) => (k, None),
            Repetition::Between(a, b) => (a, Some(b)),
        }
    }

    pub fn is_valid(&self) -> bool {
        match *self {
            Repetition::Exactly(k) | Repetition::AtLeast(k) => k >= 1,
            Repetition::Between(a, b) => a >= 1 && a <= b,
        }
    }
}

/// A regex of the DSL.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Regex {
    Class(CharClass),
    Epsilon,
    EmptySet,
    Unary(UnaryOp, Box<Regex>),
    Binary(BinaryOp, Box<Regex>, Box<Regex>),
    Repeat(Box<Regex>, Repetition),
}

impl Regex {
    pub fn class(c: CharClass) -> Regex {
        Regex::Class(c)
    }

    pub fn literal(c: char) -> Regex {
        assert!(c.is_ascii(), "literal outside the ASCII alphabet");
        Regex::Class(CharClass::Literal(c as u8))
    }

    pub fn unary(op: UnaryOp, r: Regex) -> Regex {
        Regex::Unary(op, Box::new(r))
    }

    pub fn binary(op: BinaryOp, a: Regex, b: Regex) -> Regex {
        Regex::Binary(op, Box::new(a), Box::new(b))
    }

    pub fn starts_with(r: Regex) -> Regex {
        Regex::unary(UnaryOp::StartsWith, r)
    }

    pub fn ends_with(r: Regex) -> Regex {
        Regex::unary(UnaryOp::EndsWith, r)
    }

    pub fn contains(r: Regex) -> Regex {
        Regex::unary(UnaryOp::Contains, r)
    }

    pub fn not(r: Regex) -> Regex {
        Regex::unary(UnaryOp::Not, r)
    }

    pub fn optional(r: Regex) -> Regex {
        Regex::unary(UnaryOp::Optional, r)
    }

    pub fn star(r: Regex) -> Regex {
        Regex::unary(UnaryOp::KleeneStar, r)
    }

    pub fn concat(a: Regex, b: Regex) -> Regex {
        Regex::binary(BinaryOp::Concat, a, b)
    }

    pub fn or(a: Regex, b: Regex) -> Regex {
        Regex::binary(BinaryOp::Or, a, b)
    }

    pub fn and(a: Regex, b: Regex) -> Regex {
        Regex::binary(BinaryOp::And, a, b)
    }

    pub fn repeat(r: Regex, k: u32) -> Regex {
        Regex::Repeat(Box::new(r), Repetition::Exactly(k))
    }

    pub fn repeat_at_least(r: Regex, k: u32) -> Regex {
        Regex::Repeat(Box::new(r), Repetition::AtLeast(k))
    }

    pub fn repeat_range(r: Regex, lo: u32, hi: u32) -> Regex {
        Regex::Repeat(Box::new(r), Repetition::Between(lo, hi))
    }

    /// `KleeneStar(<any>)`, the regex accepting every string.
    pub fn top() -> Regex {
        Regex::star(Regex::Class(CharClass::Any))
    }

    pub fn is_top(&self) -> bool {
        matches!(self, Regex::Unary(UnaryOp::KleeneStar, r) if **r == Regex::Class(CharClass::Any))
    }

    /// Number of AST nodes, integer arguments included.
    pub fn size(&self) -> usize {
        match self {
            Regex::Class(_) | Regex::Epsilon | Regex::EmptySet => 1,
            Regex::Unary(_, r) => 1 + r.size(),
            Regex::Binary(_, a, b) => 1 + a.size() + b.size(),
            Regex::Repeat(r, rep) => 1 + r.size() + rep.op().int_arity(),
        }
    }

    /// Height of the tree; a leaf has depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Regex::Class(_) | Regex::Epsilon | Regex::EmptySet => 1,
            Regex::Unary(_, r) | Regex::Repeat(r, _) => 1 + r.depth(),
            Regex::Binary(_, a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    /// Checks the integer-argument invariants (positive, ordered ranges).
    pub fn is_well_formed(&self) -> bool {
        match self {
            Regex::Class(_) | Regex::Epsilon | Regex::EmptySet => true,
            Regex::Unary(_, r) => r.is_well_formed(),
            Regex::Binary(_, a, b) => a.is_well_formed() && b.is_well_formed(),
            Regex::Repeat(r, rep) => rep.is_valid() && r.is_well_formed(),
        }
    }

    /// All character classes occurring in the regex.
    pub fn classes(&self, out: &mut Vec<CharClass>) {
        match self {
            Regex::Class(c) => {
                if !out.contains(c) {
                    out.push(*c)
                }
            }
            Regex::Epsilon | Regex::EmptySet => {}
            Regex::Unary(_, r) | Regex::Repeat(r, _) => r.classes(out),
            Regex::Binary(_, a, b) => {
                a.classes(out);
                b.classes(out);
            }
        }
    }

    /// Rewrites `Optional` and `KleeneStar` into `Or`/`RepeatAtLeast`.
    pub fn desugar(&self) -> Regex {
        match self {
            Regex::Class(_) | Regex::Epsilon | Regex::EmptySet => self.clone(),
            Regex::Unary(UnaryOp::Optional, r) => Regex::or(Regex::Epsilon, r.desugar()),
            Regex::Unary(UnaryOp::KleeneStar, r) => {
                Regex::or(Regex::Epsilon, Regex::repeat_at_least(r.desugar(), 1))
            }
            Regex::Unary(op, r) => Regex::unary(*op, r.desugar()),
            Regex::Binary(op, a, b) => Regex::binary(*op, a.desugar(), b.desugar()),
            Regex::Repeat(r, rep) => Regex::Repeat(Box::new(r.desugar()), *rep),
        }
    }

    /// Whole-string membership.
    ///
    /// Runs the string through the compiled automaton; if compilation hits
    /// the state cap the span evaluator answers instead, which is exact but
    /// cubic in the string length.
    pub fn is_match(&self, s: &str) -> bool {
        match crate::automaton::Dfa::compile(self) {
            Ok(dfa) => dfa.accepts(s.as_bytes()),
            Err(_) => SpanMatcher::new().is_match_slow(self, s.as_bytes()),
        }
    }
}

impl fmt::Display for Regex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regex::Class(c) => write!(f, "{c}"),
            Regex::Epsilon => write!(f, "eps"),
            Regex::EmptySet => write!(f, "null"),
            Regex::Unary(op, r) => write!(f, "{}({r})", op.name()),
            Regex::Binary(op, a, b) => write!(f, "{}({a},{b})", op.name()),
            Regex::Repeat(r, rep) => match rep {
                Repetition::Exactly(k) => write!(f, "Repeat({r},{k})"),
                Repetition::AtLeast(k) => write!(f, "RepeatAtLeast({r},{k})"),
                Repetition::Between(a, b) => write!(f, "RepeatRange({r},{a},{b})"),
            },
        }
    }
}

/// Canonical text of a regex; accepted by [`parse_regex`].
pub fn print_regex(r: &Regex) -> String {
    r.to_string()
}

/// Free-function form of [`Regex::is_match`].
pub fn is_match(r: &Regex, s: &str) -> bool {
    r.is_match(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(s: &str) -> Regex {
        parse_regex(s).unwrap()
    }

    fn target() -> Regex {
        re("Concat(RepeatRange(<num>,1,15),Optional(Concat(<.>,RepeatRange(<num>,1,3))))")
    }

    #[test]
    fn desugar_optional_and_star() {
        assert_eq!(re("Optional(<num>)").desugar(), re("Or(eps,<num>)"));
        assert_eq!(re("KleeneStar(<a>)").desugar(), re("Or(eps,RepeatAtLeast(<a>,1))"));
        assert_eq!(re("<num>").desugar(), re("<num>"));
    }

    #[test]
    fn running_example_matches() {
        let r = target();
        assert!(r.is_match("123456789.123"));
        assert!(!r.is_match("1.12345"));
        for p in ["123456789.123", "123456789123456.12", "12345.1", "123456789123456"] {
            assert!(r.is_match(p), "{p}");
        }
        for n in ["1234567891234567", "123.1234", "1.12345", ".1234"] {
            assert!(!r.is_match(n), "{n}");
        }
    }

    #[test]
    fn epsilon_and_empty() {
        assert!(Regex::Epsilon.is_match(""));
        assert!(!Regex::EmptySet.is_match(""));
        assert!(!Regex::Epsilon.is_match("a"));
    }

    #[test]
    fn size_and_depth() {
        let r = target();
        assert_eq!(r.size(), 12);
        assert_eq!(r.depth(), 5);
    }

    #[test]
    fn print_canonical() {
        assert_eq!(print_regex(&re("Concat( <num> , <let> )")), "Concat(<num>,<let>)");
        assert_eq!(print_regex(&Regex::repeat_range(Regex::class(CharClass::Num), 1, 3)), "RepeatRange(<num>,1,3)");
    }
}
