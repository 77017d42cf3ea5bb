use std::collections::BTreeMap;

use super::formula::{Coef, LenFormula, LenTerm, LenVar, Rel, SymRel};
use crate::regex::{BinaryOp, Repetition, UnaryOp};
use crate::sketch::IntSlot;
use crate::synthesis::{Node, PartialRegex};

/// Length constraint of a symbolic regex over its root length variable.
///
/// Every instantiation matching a string of length `n` satisfies the formula
/// with `n` for the returned variable.
pub fn encode(p: &PartialRegex, max: u32) -> (LenFormula, LenVar) {
    let mut enc = Encoder { next: 0, max };
    let x = enc.fresh();
    let phi = enc.node(&p.root, x);
    (phi, x)
}

struct Encoder {
    next: u32,
    max: u32,
}

impl Encoder {
    fn fresh(&mut self) -> LenVar {
        self.next += 1;
        LenVar(self.next - 1)
    }

    fn node(&mut self, n: &Node, x: LenVar) -> LenFormula {
        match n {
            Node::Class(_) => LenFormula::len(x, Rel::Eq, LenTerm::constant(1)),
            Node::Epsilon => LenFormula::len(x, Rel::Eq, LenTerm::constant(0)),
            Node::EmptySet => LenFormula::False,
            Node::Open(_) => LenFormula::True,
            Node::Unary(UnaryOp::Not, _) => LenFormula::True,
            Node::Unary(UnaryOp::StartsWith | UnaryOp::EndsWith | UnaryOp::Contains, a) => {
                let x1 = self.fresh();
                let phi1 = self.node(a, x1);
                LenFormula::exists(vec![x1], LenFormula::and(vec![LenFormula::len(x, Rel::Ge, LenTerm::var(x1)), phi1]))
            }
            Node::Unary(op @ (UnaryOp::Optional | UnaryOp::KleeneStar), a) => {
                let x1 = self.fresh();
                let phi1 = self.node(a, x1);
                let rel = if *op == UnaryOp::Optional { Rel::Eq } else { Rel::Ge };
                // the empty string is matched even when the argument matches nothing
                LenFormula::or(vec![
                    LenFormula::len(x, Rel::Eq, LenTerm::constant(0)),
                    LenFormula::exists(vec![x1], LenFormula::and(vec![LenFormula::len(x, rel, LenTerm::var(x1)), phi1])),
                ])
            }
            Node::Binary(BinaryOp::Concat, a, b) => {
                let (x1, x2) = (self.fresh(), self.fresh());
                let phi1 = self.node(a, x1);
                let phi2 = self.node(b, x2);
                LenFormula::exists(
                    vec![x1, x2],
                    LenFormula::and(vec![LenFormula::len(x, Rel::Eq, LenTerm::sum(&[x1, x2])), phi1, phi2]),
                )
            }
            Node::Binary(BinaryOp::Or, a, b) => {
                let (x1, x2) = (self.fresh(), self.fresh());
                let phi1 = self.node(a, x1);
                let phi2 = self.node(b, x2);
                LenFormula::or(vec![
                    LenFormula::exists(vec![x1], LenFormula::and(vec![LenFormula::len(x, Rel::Eq, LenTerm::var(x1)), phi1])),
                    LenFormula::exists(vec![x2], LenFormula::and(vec![LenFormula::len(x, Rel::Eq, LenTerm::var(x2)), phi2])),
                ])
            }
            Node::Binary(BinaryOp::And, a, b) => {
                let (x1, x2) = (self.fresh(), self.fresh());
                let phi1 = self.node(a, x1);
                let phi2 = self.node(b, x2);
                LenFormula::exists(
                    vec![x1, x2],
                    LenFormula::and(vec![
                        LenFormula::len(x, Rel::Eq, LenTerm::var(x1)),
                        LenFormula::len(x, Rel::Eq, LenTerm::var(x2)),
                        phi1,
                        phi2,
                    ]),
                )
            }
            Node::Repeat(a, rep) => {
                let x1 = self.fresh();
                let phi1 = self.node(a, x1);
                let mut parts = Vec::new();
                let mut vars = vec![x1];
                for slot in rep.ints() {
                    if let IntSlot::Sym(k) = slot {
                        parts.push(LenFormula::sym(k, SymRel::Ge, 1));
                        parts.push(LenFormula::sym(k, SymRel::Le, self.max));
                    }
                }
                let (lo, hi) = match *rep {
                    Repetition::Exactly(k) => (coef(k), Some(coef(k))),
                    Repetition::AtLeast(k) => (coef(k), None),
                    Repetition::Between(k1, k2) => {
                        match (k1, k2) {
                            (IntSlot::Sym(a), IntSlot::Sym(b)) => parts.push(LenFormula::SymLe(a, b)),
                            (IntSlot::Const(c), IntSlot::Sym(b)) => parts.push(LenFormula::sym(b, SymRel::Ge, c)),
                            (IntSlot::Sym(a), IntSlot::Const(c)) => parts.push(LenFormula::sym(a, SymRel::Le, c)),
                            (IntSlot::Const(_), IntSlot::Const(_)) => {}
                        }
                        (coef(k1), Some(coef(k2)))
                    }
                };
                parts.push(LenFormula::len(x, Rel::Ge, LenTerm::scaled(x1, lo)));
                if let Some(hi) = hi {
                    let x1b = LenVar(self.next);
                    self.next += 1;
                    let mut map = BTreeMap::from([(x1, x1b)]);
                    let copy = phi1.rename(&mut map, &mut self.next);
                    vars.push(x1b);
                    parts.push(LenFormula::len(x, Rel::Le, LenTerm::scaled(x1b, hi)));
                    parts.push(phi1);
                    parts.push(copy);
                } else {
                    parts.push(phi1);
                }
                LenFormula::exists(vars, LenFormula::and(parts))
            }
        }
    }
}

fn coef(slot: IntSlot) -> Coef {
    match slot {
        IntSlot::Const(c) => Coef::Const(c as u64),
        IntSlot::Sym(k) => Coef::Sym(k),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regex::parse_regex;

    #[test]
    fn class_and_not() {
        let p = PartialRegex::from_regex(&parse_regex("<num>").unwrap());
        let (phi, x) = encode(&p, 5);
        assert_eq!(phi.to_string(), format!("{x} = 1"));
        let p = PartialRegex::from_regex(&parse_regex("Not(Concat(<a>,<b>))").unwrap());
        assert_eq!(encode(&p, 5).0, LenFormula::True);
    }

    #[test]
    fn repeat_copies_are_renamed_apart() {
        let p = PartialRegex::from_regex(&parse_regex("Repeat(Concat(<a>,<b>),2)").unwrap());
        let (phi, _) = encode(&p, 5);
        let text = phi.to_string();
        assert!(text.contains("exists x2,x3"), "{text}");
        assert!(text.contains("exists x5,x6"), "{text}");
    }
}
