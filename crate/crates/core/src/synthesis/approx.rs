use super::partial::{Node, PartialRegex};
use crate::regex::{BinaryOp, Regex, Repetition, UnaryOp};
use crate::sketch::{HSketch, IntSlot, DEFAULT_DEPTH};

/// Over- and under-approximation of a partial regex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApproxPair {
    pub over: Regex,
    pub under: Regex,
}

fn top() -> Regex {
    Regex::top()
}

fn bot() -> Regex {
    Regex::EmptySet
}

fn is_bot(r: &Regex) -> bool {
    matches!(r, Regex::EmptySet)
}

// Constructors that fold the trivial cases involving top and bottom; each
// rewrite preserves the language exactly.
fn mk_unary(op: UnaryOp, r: Regex) -> Regex {
    match op {
        UnaryOp::Not if r.is_top() => bot(),
        UnaryOp::Not if is_bot(&r) => top(),
        UnaryOp::Not => match r {
            Regex::Unary(UnaryOp::Not, inner) => *inner,
            r => Regex::not(r),
        },
        UnaryOp::StartsWith | UnaryOp::EndsWith | UnaryOp::Contains if r.is_top() || is_bot(&r) => r,
        UnaryOp::KleeneStar | UnaryOp::Optional if r.is_top() => r,
        UnaryOp::KleeneStar | UnaryOp::Optional if is_bot(&r) => Regex::Epsilon,
        op => Regex::unary(op, r),
    }
}

fn mk_binary(op: BinaryOp, a: Regex, b: Regex) -> Regex {
    match op {
        BinaryOp::Concat if is_bot(&a) || is_bot(&b) => bot(),
        BinaryOp::Concat if a.is_top() && b.is_top() => top(),
        BinaryOp::Or if a.is_top() || b.is_top() => top(),
        BinaryOp::Or if is_bot(&a) => b,
        BinaryOp::Or if is_bot(&b) => a,
        BinaryOp::And if is_bot(&a) || is_bot(&b) => bot(),
        BinaryOp::And if a.is_top() => b,
        BinaryOp::And if b.is_top() => a,
        op => Regex::binary(op, a, b),
    }
}

fn mk_repeat(r: Regex, rep: Repetition) -> Regex {
    // every integer is at least one, so at least one copy is required
    if is_bot(&r) || r.is_top() {
        r
    } else {
        Regex::Repeat(Box::new(r), rep)
    }
}

fn const_rep(rep: &Repetition<IntSlot>) -> Option<Repetition> {
    let ints: Option<Vec<u32>> = rep
        .ints()
        .into_iter()
        .map(|slot| match slot {
            IntSlot::Const(c) => Some(c),
            IntSlot::Sym(_) => None,
        })
        .collect();
    Repetition::from_op(rep.op(), &ints?)
}

fn repeat_pair(o: Regex, u: Regex, rep: &Repetition<IntSlot>) -> (Regex, Regex) {
    match (const_rep(rep), rep) {
        (Some(rep), _) => (mk_repeat(o, rep), mk_repeat(u, rep)),
        // completions keep their ranges well formed, so the upper bound is
        // at least the known lower one
        (None, Repetition::Between(IntSlot::Const(lo), _)) => {
            (mk_repeat(o, Repetition::AtLeast(*lo)), mk_repeat(u, Repetition::Exactly(*lo)))
        }
        (None, Repetition::Between(_, IntSlot::Const(hi))) => (mk_repeat(o, Repetition::Between(1, *hi)), bot()),
        (None, _) => (mk_repeat(o, Repetition::AtLeast(1)), bot()),
    }
}

/// Approximates a partial regex from the root down.
pub fn approximate(p: &PartialRegex) -> ApproxPair {
    let (over, under) = node(&p.root);
    ApproxPair { over, under }
}

pub(crate) fn node(n: &Node) -> (Regex, Regex) {
    match n {
        Node::Class(c) => (Regex::Class(*c), Regex::Class(*c)),
        Node::Epsilon => (Regex::Epsilon, Regex::Epsilon),
        Node::EmptySet => (bot(), bot()),
        Node::Open(s) => sketch(s),
        Node::Unary(UnaryOp::Not, a) => {
            let (o, u) = node(a);
            (mk_unary(UnaryOp::Not, u), mk_unary(UnaryOp::Not, o))
        }
        Node::Unary(op, a) => {
            let (o, u) = node(a);
            (mk_unary(*op, o), mk_unary(*op, u))
        }
        Node::Binary(op, a, b) => {
            let (o1, u1) = node(a);
            let (o2, u2) = node(b);
            (mk_binary(*op, o1, o2), mk_binary(*op, u1, u2))
        }
        Node::Repeat(a, rep) => {
            let (o, u) = node(a);
            repeat_pair(o, u, rep)
        }
    }
}

/// Approximates a sketch label; holes without a depth use the default.
pub fn sketch(s: &HSketch) -> (Regex, Regex) {
    match s {
        HSketch::Concrete(r) => (r.clone(), r.clone()),
        HSketch::Hole(h) => {
            if h.depth.unwrap_or(DEFAULT_DEPTH) > 1 {
                return (top(), bot());
            }
            let mut parts = h.hints.iter().map(sketch);
            let (mut o, mut u) = parts.next().expect("holes have at least one hint");
            for (o2, u2) in parts {
                o = mk_binary(BinaryOp::Or, o, o2);
                u = mk_binary(BinaryOp::And, u, u2);
            }
            (o, u)
        }
        HSketch::Unary(UnaryOp::Not, a) => {
            let (o, u) = sketch(a);
            (mk_unary(UnaryOp::Not, u), mk_unary(UnaryOp::Not, o))
        }
        HSketch::Unary(op, a) => {
            let (o, u) = sketch(a);
            (mk_unary(*op, o), mk_unary(*op, u))
        }
        HSketch::Binary(op, a, b) => {
            let (o1, u1) = sketch(a);
            let (o2, u2) = sketch(b);
            (mk_binary(*op, o1, o2), mk_binary(*op, u1, u2))
        }
        HSketch::Repeat(a, rep) => {
            let (o, u) = sketch(a);
            repeat_pair(o, u, rep)
        }
    }
}
