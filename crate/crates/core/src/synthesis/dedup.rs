use std::collections::HashMap;

use super::examples::Checker;
use super::partial::Node;
use crate::automaton::language_key;
use crate::regex::{BinaryOp, RepeatOp, UnaryOp};
use crate::sketch::{HSketch, IntSlot, SymId};

/// Keys partial regexes up to renaming of symbolic integers and
/// equivalence of their concrete parts: a concrete root is keyed by its
/// language, a concrete proper subtree by its behaviour on the examples.
#[derive(Default)]
pub(crate) struct Canon {
    langs: HashMap<Vec<u32>, u32>,
    concrete: HashMap<Node, u32>,
    observed: HashMap<Vec<u128>, u32>,
    observed_nodes: HashMap<Node, u32>,
    sketches: HashMap<HSketch, u32>,
    fresh: u32,
}

const CONCRETE: u32 = 0;
const OPEN: u32 = 1;
const UNARY: u32 = 2;
const BINARY: u32 = 3;
const REPEAT: u32 = 4;
const OBSERVED: u32 = 5;

fn concrete(n: &Node) -> bool {
    match n {
        Node::Class(_) | Node::Epsilon | Node::EmptySet => true,
        Node::Open(_) => false,
        Node::Unary(_, a) => concrete(a),
        Node::Binary(_, a, b) => concrete(a) && concrete(b),
        Node::Repeat(a, rep) => rep.ints().iter().all(|s| matches!(s, IntSlot::Const(_))) && concrete(a),
    }
}

fn unary_code(op: UnaryOp) -> u32 {
    UnaryOp::ALL.iter().position(|&o| o == op).unwrap() as u32
}

fn binary_code(op: BinaryOp) -> u32 {
    BinaryOp::ALL.iter().position(|&o| o == op).unwrap() as u32
}

fn repeat_code(op: RepeatOp) -> u32 {
    RepeatOp::ALL.iter().position(|&o| o == op).unwrap() as u32
}

impl Canon {
    pub fn key(&mut self, root: &Node, checker: &mut Checker) -> Vec<u32> {
        if concrete(root) {
            return vec![CONCRETE, self.lang_id(root)];
        }
        let mut out = Vec::new();
        let mut syms = Vec::new();
        self.walk(root, &mut out, &mut syms, checker);
        out
    }

    fn observed_id(&mut self, n: &Node, checker: &mut Checker) -> Option<u32> {
        if let Some(&id) = self.observed_nodes.get(n) {
            return Some(id);
        }
        let sig = checker.signature(&n.to_regex().expect("concrete"))?;
        let next = self.observed.len() as u32;
        let id = *self.observed.entry(sig).or_insert(next);
        self.observed_nodes.insert(n.clone(), id);
        Some(id)
    }

    fn lang_id(&mut self, n: &Node) -> u32 {
        if let Some(&id) = self.concrete.get(n) {
            return id;
        }
        let next = self.langs.len() as u32 + self.fresh;
        let id = match language_key(&n.to_regex().expect("concrete")) {
            Ok(k) => *self.langs.entry(k).or_insert(next),
            Err(_) => {
                self.fresh += 1;
                next
            }
        };
        self.concrete.insert(n.clone(), id);
        id
    }

    fn walk(&mut self, n: &Node, out: &mut Vec<u32>, syms: &mut Vec<SymId>, checker: &mut Checker) {
        if concrete(n) {
            match self.observed_id(n, checker) {
                Some(id) => out.extend([OBSERVED, id]),
                None => {
                    let id = self.lang_id(n);
                    out.extend([CONCRETE, id]);
                }
            }
            return;
        }
        match n {
            Node::Open(s) => {
                let next = self.sketches.len() as u32;
                let id = *self.sketches.entry((**s).clone()).or_insert(next);
                out.extend([OPEN, id]);
            }
            Node::Unary(op, a) => {
                out.extend([UNARY, unary_code(*op)]);
                self.walk(a, out, syms, checker);
            }
            Node::Binary(op, a, b) => {
                out.extend([BINARY, binary_code(*op)]);
                self.walk(a, out, syms, checker);
                self.walk(b, out, syms, checker);
            }
            Node::Repeat(a, rep) => {
                out.extend([REPEAT, repeat_code(rep.op())]);
                for slot in rep.ints() {
                    match slot {
                        IntSlot::Const(c) => out.extend([0, c]),
                        IntSlot::Sym(k) => {
                            let i = match syms.iter().position(|&s| s == k) {
                                Some(i) => i,
                                None => {
                                    syms.push(k);
                                    syms.len() - 1
                                }
                            };
                            out.extend([1, i as u32]);
                        }
                    }
                }
                self.walk(a, out, syms, checker);
            }
            Node::Class(_) | Node::Epsilon | Node::EmptySet => unreachable!(),
        }
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::regex::parse_regex;
    use crate::sketch::parse_sketch;
    use crate::synthesis::Examples;

    fn with_hole(left: &str) -> Node {
        let hole = parse_sketch("?2{<num>}").unwrap();
        Node::Binary(
            BinaryOp::Concat,
            Arc::new(Node::from_regex(&parse_regex(left).unwrap())),
            Arc::new(Node::Open(Arc::new(hole))),
        )
    }

    #[test]
    fn subtrees_are_keyed_by_behaviour_on_examples() {
        let mut canon = Canon::default();
        let mut digits = Checker::new(&Examples::new(["12", "3.4"], ["x"]).unwrap());
        assert_eq!(canon.key(&with_hole("<num>"), &mut digits), canon.key(&with_hole("<hex>"), &mut digits));
        assert_ne!(canon.key(&with_hole("<num>"), &mut digits), canon.key(&with_hole("<.>"), &mut digits));
        let mut canon = Canon::default();
        let mut hex = Checker::new(&Examples::new(["12", "f"], Vec::<String>::new()).unwrap());
        assert_ne!(canon.key(&with_hole("<num>"), &mut hex), canon.key(&with_hole("<hex>"), &mut hex));
    }

    #[test]
    fn concrete_roots_are_keyed_by_language() {
        let mut canon = Canon::default();
        let mut digits = Checker::new(&Examples::new(["12"], ["a"]).unwrap());
        let root = |s: &str| Node::from_regex(&parse_regex(s).unwrap());
        assert_eq!(canon.key(&root("Or(<num>,<hex>)"), &mut digits), canon.key(&root("<hex>"), &mut digits));
        assert_ne!(canon.key(&root("<num>"), &mut digits), canon.key(&root("<hex>"), &mut digits));
    }

    #[test]
    fn symbols_are_renamed() {
        let mut canon = Canon::default();
        let rep = |a, b| {
            Node::Repeat(
                Arc::new(Node::Open(Arc::new(parse_sketch("?1{<a>}").unwrap()))),
                crate::regex::Repetition::Between(IntSlot::Sym(SymId(a)), IntSlot::Sym(SymId(b))),
            )
        };
        let mut ch = Checker::new(&Examples::default());
        assert_eq!(canon.key(&rep(3, 4), &mut ch), canon.key(&rep(0, 1), &mut ch));
        assert_ne!(canon.key(&rep(1, 0), &mut ch), canon.key(&rep(0, 0), &mut ch));
    }
}
