use std::fmt;
use std::sync::Arc;

use crate::regex::{BinaryOp, CharClass, Regex, Repetition, UnaryOp};
use crate::sketch::{HSketch, IntSlot, SymId};

/// A node of a partial regex. `Open` leaves carry the sketch that still has
/// to be expanded; integer slots of repetitions may be symbolic.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Class(CharClass),
    Epsilon,
    EmptySet,
    Unary(UnaryOp, Arc<Node>),
    Binary(BinaryOp, Arc<Node>, Arc<Node>),
    Repeat(Arc<Node>, Repetition<IntSlot>),
    Open(Arc<HSketch>),
}

impl Node {
    pub fn from_regex(r: &Regex) -> Node {
        match r {
            Regex::Class(c) => Node::Class(*c),
            Regex::Epsilon => Node::Epsilon,
            Regex::EmptySet => Node::EmptySet,
            Regex::Unary(op, a) => Node::Unary(*op, Arc::new(Node::from_regex(a))),
            Regex::Binary(op, a, b) => {
                Node::Binary(*op, Arc::new(Node::from_regex(a)), Arc::new(Node::from_regex(b)))
            }
            Regex::Repeat(a, rep) => Node::Repeat(Arc::new(Node::from_regex(a)), rep.map(IntSlot::Const)),
        }
    }

    /// The concrete regex, if no open node or symbolic integer remains.
    pub fn to_regex(&self) -> Option<Regex> {
        Some(match self {
            Node::Class(c) => Regex::Class(*c),
            Node::Epsilon => Regex::Epsilon,
            Node::EmptySet => Regex::EmptySet,
            Node::Unary(op, a) => Regex::unary(*op, a.to_regex()?),
            Node::Binary(op, a, b) => Regex::binary(*op, a.to_regex()?, b.to_regex()?),
            Node::Repeat(a, rep) => {
                let ints: Option<Vec<u32>> = rep
                    .ints()
                    .into_iter()
                    .map(|slot| match slot {
                        IntSlot::Const(c) => Some(c),
                        IntSlot::Sym(_) => None,
                    })
                    .collect();
                Regex::Repeat(Box::new(a.to_regex()?), Repetition::from_op(rep.op(), &ints?).unwrap())
            }
            Node::Open(_) => return None,
        })
    }

    /// Node count; integer arguments belong to their repetition node and an
    /// open node counts once.
    pub fn size(&self) -> usize {
        match self {
            Node::Class(_) | Node::Epsilon | Node::EmptySet | Node::Open(_) => 1,
            Node::Unary(_, a) => 1 + a.size(),
            Node::Binary(_, a, b) => 1 + a.size() + b.size(),
            Node::Repeat(a, _) => 1 + a.size(),
        }
    }

    pub fn has_open(&self) -> bool {
        match self {
            Node::Open(_) => true,
            Node::Class(_) | Node::Epsilon | Node::EmptySet => false,
            Node::Unary(_, a) | Node::Repeat(a, _) => a.has_open(),
            Node::Binary(_, a, b) => a.has_open() || b.has_open(),
        }
    }

    /// Symbolic integers in preorder (a repetition's own slots before its
    /// argument's).
    pub fn syms(&self, out: &mut Vec<SymId>) {
        match self {
            Node::Class(_) | Node::Epsilon | Node::EmptySet | Node::Open(_) => {}
            Node::Unary(_, a) => a.syms(out),
            Node::Binary(_, a, b) => {
                a.syms(out);
                b.syms(out);
            }
            Node::Repeat(a, rep) => {
                for slot in rep.ints() {
                    if let IntSlot::Sym(k) = slot {
                        out.push(k);
                    }
                }
                a.syms(out);
            }
        }
    }

    /// Path (child indices) of the leftmost-outermost open node.
    pub fn first_open(&self) -> Option<Vec<usize>> {
        match self {
            Node::Open(_) => Some(Vec::new()),
            Node::Class(_) | Node::Epsilon | Node::EmptySet => None,
            Node::Unary(_, a) | Node::Repeat(a, _) => a.first_open().map(|mut p| {
                p.insert(0, 0);
                p
            }),
            Node::Binary(_, a, b) => a
                .first_open()
                .map(|mut p| {
                    p.insert(0, 0);
                    p
                })
                .or_else(|| {
                    b.first_open().map(|mut p| {
                        p.insert(0, 1);
                        p
                    })
                }),
        }
    }

    pub fn get(&self, path: &[usize]) -> Option<&Node> {
        match path.split_first() {
            None => Some(self),
            Some((&i, rest)) => match (self, i) {
                (Node::Unary(_, a), 0) | (Node::Repeat(a, _), 0) | (Node::Binary(_, a, _), 0) => a.get(rest),
                (Node::Binary(_, _, b), 1) => b.get(rest),
                _ => None,
            },
        }
    }

    /// Copy of the tree with the node at `path` replaced; untouched subtrees
    /// are shared.
    pub fn replace(&self, path: &[usize], new: Node) -> Node {
        match path.split_first() {
            None => new,
            Some((&i, rest)) => match (self, i) {
                (Node::Unary(op, a), 0) => Node::Unary(*op, Arc::new(a.replace(rest, new))),
                (Node::Repeat(a, rep), 0) => Node::Repeat(Arc::new(a.replace(rest, new)), *rep),
                (Node::Binary(op, a, b), 0) => Node::Binary(*op, Arc::new(a.replace(rest, new)), b.clone()),
                (Node::Binary(op, a, b), 1) => Node::Binary(*op, a.clone(), Arc::new(b.replace(rest, new))),
                _ => panic!("invalid path into partial regex"),
            },
        }
    }

    /// Substitutes a constant for a symbolic integer.
    pub fn assign(&self, k: SymId, value: u32) -> Node {
        match self {
            Node::Class(_) | Node::Epsilon | Node::EmptySet | Node::Open(_) => self.clone(),
            Node::Unary(op, a) => Node::Unary(*op, Arc::new(a.assign(k, value))),
            Node::Binary(op, a, b) => Node::Binary(*op, Arc::new(a.assign(k, value)), Arc::new(b.assign(k, value))),
            Node::Repeat(a, rep) => {
                let rep = rep.map(|slot| if slot == IntSlot::Sym(k) { IntSlot::Const(value) } else { slot });
                Node::Repeat(Arc::new(a.assign(k, value)), rep)
            }
        }
    }

    /// False if a range has constant bounds out of order.
    pub fn ranges_valid(&self) -> bool {
        match self {
            Node::Class(_) | Node::Epsilon | Node::EmptySet | Node::Open(_) => true,
            Node::Unary(_, a) => a.ranges_valid(),
            Node::Binary(_, a, b) => a.ranges_valid() && b.ranges_valid(),
            Node::Repeat(a, rep) => {
                let ok = match *rep {
                    Repetition::Between(IntSlot::Const(lo), IntSlot::Const(hi)) => lo <= hi,
                    _ => true,
                };
                ok && a.ranges_valid()
            }
        }
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Class(c) => write!(f, "{c}"),
            Node::Epsilon => write!(f, "eps"),
            Node::EmptySet => write!(f, "null"),
            Node::Unary(op, a) => write!(f, "{}({a})", op.name()),
            Node::Binary(op, a, b) => write!(f, "{}({a},{b})", op.name()),
            Node::Repeat(a, rep) => {
                write!(f, "{}({a}", rep.op().name())?;
                for slot in rep.ints() {
                    match slot {
                        IntSlot::Const(c) => write!(f, ",{c}")?,
                        IntSlot::Sym(k) => write!(f, ",{k}")?,
                    }
                }
                write!(f, ")")
            }
            Node::Open(s) => write!(f, "{s}"),
        }
    }
}

/// A partial regex together with its supply of fresh symbolic integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartialRegex {
    pub root: Arc<Node>,
    pub next_sym: u32,
}

impl PartialRegex {
    /// The single-node partial regex labelled with `s`.
    pub fn from_sketch(s: &HSketch) -> PartialRegex {
        let mut p = PartialRegex { root: Arc::new(Node::EmptySet), next_sym: 0 };
        p.root = Arc::new(p.label(s));
        p
    }

    pub fn from_regex(r: &Regex) -> PartialRegex {
        PartialRegex { root: Arc::new(Node::from_regex(r)), next_sym: 0 }
    }

    /// Node for a sketch label: concrete regexes are placed directly, every
    /// other label becomes an open node.
    pub(crate) fn label(&mut self, s: &HSketch) -> Node {
        match s {
            HSketch::Concrete(r) => Node::from_regex(r),
            other => Node::Open(Arc::new(other.clone())),
        }
    }

    pub(crate) fn fresh(&mut self) -> SymId {
        self.next_sym += 1;
        SymId(self.next_sym - 1)
    }

    pub fn size(&self) -> usize {
        self.root.size()
    }

    pub fn is_concrete(&self) -> bool {
        !self.root.has_open() && self.syms().is_empty()
    }

    pub fn is_symbolic(&self) -> bool {
        !self.root.has_open() && !self.syms().is_empty()
    }

    pub fn syms(&self) -> Vec<SymId> {
        let mut out = Vec::new();
        self.root.syms(&mut out);
        out
    }

    pub fn to_regex(&self) -> Option<Regex> {
        self.root.to_regex()
    }

    pub fn assign(&self, k: SymId, value: u32) -> PartialRegex {
        PartialRegex { root: Arc::new(self.root.assign(k, value)), next_sym: self.next_sym }
    }
}

impl fmt::Display for PartialRegex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.root)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regex::parse_regex;
    use crate::sketch::parse_sketch;

    #[test]
    fn concrete_round_trip() {
        let r = parse_regex("Concat(RepeatRange(<num>,1,15),Optional(<a>))").unwrap();
        let p = PartialRegex::from_regex(&r);
        assert!(p.is_concrete());
        assert_eq!(p.to_regex(), Some(r.clone()));
        assert_eq!(p.size(), 5);
    }

    #[test]
    fn open_nodes_and_paths() {
        let s = parse_sketch("Concat(?{<num>},?{<a>})").unwrap();
        let p = PartialRegex::from_sketch(&s);
        assert_eq!(p.root.first_open(), Some(vec![]));
        let q = p.root.replace(&[], Node::Binary(BinaryOp::Concat, Arc::new(Node::Class(CharClass::Num)), Arc::new(Node::Open(Arc::new(s.clone())))));
        assert_eq!(q.first_open(), Some(vec![1]));
        assert!(matches!(q.get(&[1]), Some(Node::Open(_))));
    }

    #[test]
    fn assignment() {
        let node = Node::Repeat(Arc::new(Node::Class(CharClass::Num)), Repetition::Between(IntSlot::Sym(SymId(0)), IntSlot::Sym(SymId(1))));
        let p = PartialRegex { root: Arc::new(node), next_sym: 2 };
        assert!(p.is_symbolic());
        let q = p.assign(SymId(0), 2).assign(SymId(1), 5);
        assert_eq!(q.to_regex(), Some(parse_regex("RepeatRange(<num>,2,5)").unwrap()));
    }
}
