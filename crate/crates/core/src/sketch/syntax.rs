use super::{HSketch, Hole, IntSlot, SymId};
use crate::regex::{OpName, ParseError, Regex, Repetition, SyntaxParser};

/// Parses sketch text such as `Concat(?{<num>,<,>},?2{RepeatRange(<num>,1,3)})`.
///
/// Symbolic integers are written `?` and numbered in textual order.
pub fn parse_sketch(text: &str) -> Result<HSketch, ParseError> {
    let mut p = SyntaxParser::new(text);
    let mut next = 0;
    let s = sketch(&mut p, &mut next)?;
    p.finish()?;
    Ok(s)
}

pub fn print_sketch(s: &HSketch) -> String {
    s.to_string()
}

fn sketch(p: &mut SyntaxParser<'_>, next: &mut u32) -> Result<HSketch, ParseError> {
    match p.peek() {
        None => Err(p.error("unexpected end of input")),
        Some(b'?') => {
            p.eat(b'?');
            let depth = match p.peek() {
                Some(c) if c.is_ascii_digit() => Some(p.positive_int()?),
                _ => None,
            };
            p.expect(b'{')?;
            let open = p.pos();
            if p.eat(b'}') {
                return Err(ParseError::EmptyHints { pos: open });
            }
            let mut hints = vec![sketch(p, next)?];
            while p.eat(b',') {
                hints.push(sketch(p, next)?);
            }
            p.expect(b'}')?;
            Ok(HSketch::Hole(Hole { depth, hints }))
        }
        Some(b'<') => Ok(HSketch::Concrete(Regex::Class(p.char_class()?))),
        Some(_) => {
            let start = p.pos();
            let name = p.ident().ok_or_else(|| p.error("expected a sketch"))?;
            match name {
                "eps" => return Ok(HSketch::Concrete(Regex::Epsilon)),
                "null" => return Ok(HSketch::Concrete(Regex::EmptySet)),
                _ => {}
            }
            let op = OpName::lookup(name)
                .ok_or_else(|| ParseError::Syntax { pos: start, msg: format!("unknown operator '{name}'") })?;
            p.expect(b'(')?;
            let s = match op {
                OpName::Unary(op) => HSketch::unary(op, sketch(p, next)?),
                OpName::Binary(op) => {
                    let a = sketch(p, next)?;
                    p.expect(b',')?;
                    HSketch::binary(op, a, sketch(p, next)?)
                }
                OpName::Repeat(op) => {
                    let arg = sketch(p, next)?;
                    let mut ints = Vec::new();
                    for _ in 0..op.int_arity() {
                        p.expect(b',')?;
                        if p.eat(b'?') {
                            ints.push(IntSlot::Sym(SymId(*next)));
                            *next += 1;
                        } else {
                            ints.push(IntSlot::Const(p.positive_int()?));
                        }
                    }
                    if let [IntSlot::Const(lo), IntSlot::Const(hi)] = ints[..] {
                        if lo > hi {
                            return Err(ParseError::BadRange { pos: start, lo, hi });
                        }
                    }
                    HSketch::repeat(arg, Repetition::from_op(op, &ints).unwrap())
                }
            };
            p.expect(b')')?;
            Ok(s)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regex::{parse_regex, BinaryOp};

    #[test]
    fn running_example_sketch() {
        let s = parse_sketch("Concat(?{<num>,<,>},?{RepeatRange(<num>,1,3),<,>})").unwrap();
        match &s {
            HSketch::Binary(BinaryOp::Concat, a, b) => {
                assert!(matches!(&**a, HSketch::Hole(h) if h.hints.len() == 2 && h.depth.is_none()));
                match &**b {
                    HSketch::Hole(h) => {
                        assert_eq!(h.hints[0], HSketch::Concrete(parse_regex("RepeatRange(<num>,1,3)").unwrap()))
                    }
                    _ => panic!("expected a hole"),
                }
            }
            _ => panic!("expected Concat"),
        }
        assert_eq!(print_sketch(&s), "Concat(?{<num>,<,>},?{RepeatRange(<num>,1,3),<,>})");
    }

    #[test]
    fn explicit_depth_and_errors() {
        assert_eq!(
            parse_sketch("?1{<num>}").unwrap(),
            HSketch::hole_d(1, vec![HSketch::Concrete(parse_regex("<num>").unwrap())])
        );
        assert!(matches!(parse_sketch("?{}"), Err(ParseError::EmptyHints { .. })));
        assert!(parse_sketch("?{<num>").is_err());
        assert!(matches!(parse_sketch("Repeat(?{<a>},0)"), Err(ParseError::NonPositive { .. })));
    }

    #[test]
    fn symbolic_integers() {
        let s = parse_sketch("Concat(Repeat(?{<a>},?),RepeatRange(<b>,?,?))").unwrap();
        let mut ids = Vec::new();
        s.syms(&mut ids);
        assert_eq!(ids, vec![SymId(0), SymId(1), SymId(2)]);
        assert_eq!(print_sketch(&s), "Concat(Repeat(?{<a>},?),RepeatRange(<b>,?,?))");
    }

    #[test]
    fn concrete_subtrees_collapse() {
        let s = parse_sketch("Concat(<num>,Optional(<a>))").unwrap();
        assert_eq!(s, HSketch::Concrete(parse_regex("Concat(<num>,Optional(<a>))").unwrap()));
    }
}
