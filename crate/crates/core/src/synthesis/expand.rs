use std::sync::Arc;

use super::partial::{Node, PartialRegex};
use crate::regex::{BinaryOp, CharClass, Regex, RepeatOp, Repetition, UnaryOp};
use crate::sketch::{HSketch, Hole, IntSlot, DEFAULT_DEPTH};

/// Options for [`expand_with`].
#[derive(Debug, Clone)]
pub struct ExpandOptions {
    /// Classes offered to sibling holes in place of every character class.
    pub palette: Vec<CharClass>,
    /// Put the designated hole only in the first argument of `Or`/`And`.
    pub canonical_commutative: bool,
}

impl Default for ExpandOptions {
    fn default() -> Self {
        ExpandOptions { palette: CharClass::NAMED.to_vec(), canonical_commutative: false }
    }
}

/// Expands the open node at `path` with the default options.
pub fn expand(p: &PartialRegex, path: &[usize]) -> Vec<PartialRegex> {
    expand_with(p, path, &ExpandOptions::default())
}

pub fn expand_with(p: &PartialRegex, path: &[usize], opts: &ExpandOptions) -> Vec<PartialRegex> {
    let sketch = match p.root.get(path) {
        Some(Node::Open(s)) => s.clone(),
        _ => panic!("expand called on a node that is not open"),
    };
    let mut out = Vec::new();
    let mut emit = |p: &PartialRegex, next_sym: u32, node: Node| {
        out.push(PartialRegex { root: Arc::new(p.root.replace(path, node)), next_sym });
    };
    match &*sketch {
        HSketch::Hole(h) => {
            let d = h.depth.unwrap_or(DEFAULT_DEPTH);
            for hint in &h.hints {
                let mut q = p.clone();
                let node = q.label(hint);
                emit(p, q.next_sym, node);
            }
            if d > 1 {
                let inner = Arc::new(Node::Open(Arc::new(HSketch::Hole(Hole { depth: Some(d - 1), hints: h.hints.clone() }))));
                let sibling = Arc::new(Node::Open(Arc::new(HSketch::Hole(Hole {
                    depth: Some(d - 1),
                    hints: sibling_hints(&h.hints, &opts.palette),
                }))));
                for op in UnaryOp::ALL {
                    emit(p, p.next_sym, Node::Unary(op, inner.clone()));
                }
                for op in BinaryOp::ALL {
                    emit(p, p.next_sym, Node::Binary(op, inner.clone(), sibling.clone()));
                    if !(opts.canonical_commutative && op.is_commutative()) {
                        emit(p, p.next_sym, Node::Binary(op, sibling.clone(), inner.clone()));
                    }
                }
                for op in RepeatOp::ALL {
                    let mut q = p.clone();
                    let slots: Vec<IntSlot> = (0..op.int_arity()).map(|_| IntSlot::Sym(q.fresh())).collect();
                    let rep = Repetition::from_op(op, &slots).unwrap();
                    emit(p, q.next_sym, Node::Repeat(inner.clone(), rep));
                }
            }
        }
        HSketch::Unary(op, a) => {
            let mut q = p.clone();
            let a = q.label(a);
            emit(p, q.next_sym, Node::Unary(*op, Arc::new(a)));
        }
        HSketch::Binary(op, a, b) => {
            let mut q = p.clone();
            let a = q.label(a);
            let b = q.label(b);
            emit(p, q.next_sym, Node::Binary(*op, Arc::new(a), Arc::new(b)));
        }
        HSketch::Repeat(a, rep) => {
            let mut q = p.clone();
            let a = q.label(a);
            let rep = rep.map(|slot| match slot {
                IntSlot::Const(c) => IntSlot::Const(c),
                IntSlot::Sym(_) => IntSlot::Sym(q.fresh()),
            });
            emit(p, q.next_sym, Node::Repeat(Arc::new(a), rep));
        }
        HSketch::Concrete(r) => emit(p, p.next_sym, Node::from_regex(r)),
    }
    out
}

/// Palette classes followed by the hole's own hints, without duplicates.
fn sibling_hints(hints: &[HSketch], palette: &[CharClass]) -> Vec<HSketch> {
    let mut out: Vec<HSketch> = Vec::with_capacity(palette.len() + hints.len());
    for &c in palette {
        let s = HSketch::Concrete(Regex::Class(c));
        if !out.contains(&s) {
            out.push(s);
        }
    }
    for h in hints {
        if !out.contains(h) {
            out.push(h.clone());
        }
    }
    out
}
