use std::fmt;

use thiserror::Error;

use super::tokens::Token;
use crate::regex::{BinaryOp, CharClass, Regex, Repetition, UnaryOp};
use crate::sketch::{HSketch, IntSlot};

/// The grammar shipped with the crate.
pub const DEMO_GRAMMAR: &str = include_str!("../../grammars/demo.grammar");

/// Category whose derivations are parse results.
pub const ROOT: &str = "$ROOT";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrammarError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("grammar has no {ROOT} rule")]
    NoRoot,
    #[error("unary rules form a cycle through {0}")]
    UnaryCycle(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleKind {
    Lexical,
    Compositional,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Symbol {
    Word(String),
    Category(String),
    /// Any integer token.
    AnyInt,
    /// Any quoted literal.
    AnyLiteral,
}

impl Symbol {
    pub fn matches(&self, tok: &Token) -> bool {
        match (self, tok) {
            (Symbol::Word(w), Token::Word(t)) => w == t,
            (Symbol::AnyInt, t) => t.as_int().is_some(),
            (Symbol::AnyLiteral, Token::Literal(_)) => true,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SemFn {
    Identity,
    Sketch,
    Binary(BinaryOp),
    Unary(UnaryOp),
    Repeat,
    RepeatAtLeast,
    RepeatRange,
    Int,
    CharClass,
}

impl SemFn {
    fn from_name(name: &str) -> Option<SemFn> {
        Some(match name {
            "IdentityFn" => SemFn::Identity,
            "SketchFn" => SemFn::Sketch,
            "ConcatFn" => SemFn::Binary(BinaryOp::Concat),
            "OrFn" => SemFn::Binary(BinaryOp::Or),
            "AndFn" => SemFn::Binary(BinaryOp::And),
            "NotFn" => SemFn::Unary(UnaryOp::Not),
            "OptionalFn" => SemFn::Unary(UnaryOp::Optional),
            "KleeneStarFn" => SemFn::Unary(UnaryOp::KleeneStar),
            "StartsWithFn" => SemFn::Unary(UnaryOp::StartsWith),
            "EndsWithFn" => SemFn::Unary(UnaryOp::EndsWith),
            "ContainsFn" => SemFn::Unary(UnaryOp::Contains),
            "RepeatFn" => SemFn::Repeat,
            "RepeatAtLeastFn" => SemFn::RepeatAtLeast,
            "RepeatRangeFn" => SemFn::RepeatRange,
            "IntFn" => SemFn::Int,
            "CharClassFn" => SemFn::CharClass,
            _ => return None,
        })
    }

    fn arity(self) -> (usize, usize) {
        match self {
            SemFn::Identity | SemFn::Unary(_) => (1, 1),
            SemFn::Sketch => (1, usize::MAX),
            SemFn::Binary(_) | SemFn::Repeat | SemFn::RepeatAtLeast => (2, 2),
            SemFn::RepeatRange => (3, 3),
            SemFn::Int | SemFn::CharClass => (0, 1),
        }
    }
}

/// Semantic function applied to the category slots of a rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SemExpr {
    Call(SemFn, Vec<SemExpr>),
    /// 1-based category slot.
    Slot(usize),
    Int(u32),
    Name(String),
}

/// Denotation of a derivation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Int(u32),
    Sketch(HSketch),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Sketch(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    /// `L<n>` or `C<n>`, numbered in file order within each kind.
    pub id: String,
    pub kind: RuleKind,
    pub category: String,
    pub pattern: Vec<Symbol>,
    pub sem: SemExpr,
}

impl Rule {
    pub fn slots(&self) -> usize {
        self.pattern.iter().filter(|s| matches!(s, Symbol::Category(_))).count()
    }

    /// A rule whose pattern is a single category rewrites a derivation over
    /// the same span.
    pub fn is_unary(&self) -> bool {
        matches!(self.pattern.as_slice(), [Symbol::Category(_)])
    }

    /// Denotation from the slot values and the tokens matched by `@int` and
    /// `@lit`; `None` if the values do not fit the function.
    pub fn apply(&self, children: &[&Value], captured: &[&Token]) -> Option<Value> {
        eval(&self.sem, children, captured)
    }
}

fn sketch_of(v: Value) -> Option<HSketch> {
    match v {
        Value::Sketch(s) => Some(s),
        Value::Int(_) => None,
    }
}

fn int_of(v: Value) -> Option<u32> {
    match v {
        Value::Int(n) if n >= 1 => Some(n),
        _ => None,
    }
}

fn class_named(name: &str) -> Option<CharClass> {
    if let Some(c) = CharClass::from_name(name) {
        return Some(c);
    }
    match name {
        "space" => Some(CharClass::Literal(b' ')),
        _ if name.len() == 1 && name.is_ascii() => Some(CharClass::Literal(name.as_bytes()[0])),
        _ => None,
    }
}

fn eval(e: &SemExpr, children: &[&Value], captured: &[&Token]) -> Option<Value> {
    let (f, args) = match e {
        SemExpr::Slot(k) => return children.get(k - 1).map(|v| (*v).clone()),
        SemExpr::Int(n) => return Some(Value::Int(*n)),
        SemExpr::Name(_) => return None,
        SemExpr::Call(f, args) => (*f, args),
    };
    let arg = |i: usize| eval(&args[i], children, captured);
    let sketch = Value::Sketch;
    Some(match f {
        SemFn::Identity => arg(0)?,
        SemFn::Sketch => {
            let mut hints = Vec::new();
            for i in 0..args.len() {
                match sketch_of(arg(i)?)? {
                    HSketch::Hole(h) if h.depth.is_none() => hints.extend(h.hints),
                    s => hints.push(s),
                }
            }
            // same order as `HSketch::normalized`, so equal holes compare equal
            hints.sort_by_cached_key(|h| h.to_string());
            hints.dedup();
            sketch(HSketch::hole(hints))
        }
        SemFn::Binary(op) => sketch(HSketch::binary(op, sketch_of(arg(0)?)?, sketch_of(arg(1)?)?)),
        SemFn::Unary(op) => sketch(HSketch::unary(op, sketch_of(arg(0)?)?)),
        SemFn::Repeat => sketch(HSketch::repeat(sketch_of(arg(0)?)?, Repetition::Exactly(IntSlot::Const(int_of(arg(1)?)?)))),
        SemFn::RepeatAtLeast => {
            sketch(HSketch::repeat(sketch_of(arg(0)?)?, Repetition::AtLeast(IntSlot::Const(int_of(arg(1)?)?))))
        }
        SemFn::RepeatRange => {
            let (lo, hi) = (int_of(arg(1)?)?, int_of(arg(2)?)?);
            if lo > hi {
                return None;
            }
            sketch(HSketch::repeat(sketch_of(arg(0)?)?, Repetition::Between(IntSlot::Const(lo), IntSlot::Const(hi))))
        }
        SemFn::Int => match args.first() {
            Some(a) => eval(a, children, captured)?,
            None => Value::Int(captured.iter().find_map(|t| t.as_int())?),
        },
        SemFn::CharClass => {
            let class = match args.first() {
                Some(SemExpr::Name(n)) => class_named(n)?,
                Some(_) => return None,
                None => match captured.iter().find(|t| matches!(t, Token::Literal(_)))? {
                    Token::Literal(l) => class_named(l).filter(|c| matches!(c, CharClass::Literal(_)))?,
                    Token::Word(_) => return None,
                },
            };
            sketch(HSketch::concrete(Regex::Class(class)))
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grammar {
    pub rules: Vec<Rule>,
}

impl Grammar {
    pub fn demo() -> Grammar {
        Grammar::parse(DEMO_GRAMMAR).expect("the demo grammar is valid")
    }

    /// Reads `CATEGORY -> pattern :: Fn(args)` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Grammar, GrammarError> {
        let mut rules = Vec::new();
        let (mut lexical, mut compositional) = (0, 0);
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = strip_comment(raw).trim();
            if content.is_empty() {
                continue;
            }
            let err = |message: String| GrammarError::Syntax { line, message };
            let (lhs, rest) = content.split_once("->").ok_or_else(|| err("expected `->`".into()))?;
            let (pattern, sem) = rest.split_once("::").ok_or_else(|| err("expected `::`".into()))?;
            let category = lhs.trim();
            if !is_category(category) {
                return Err(err(format!("bad category {category:?}")));
            }
            let pattern = parse_pattern(pattern).map_err(err)?;
            let slots = pattern.iter().filter(|s| matches!(s, Symbol::Category(_))).count();
            let sem = SemParser { s: sem.trim().as_bytes(), pos: 0 }.parse(slots).map_err(err)?;
            check(&sem, &pattern, slots).map_err(err)?;
            let kind = if slots == 0 { RuleKind::Lexical } else { RuleKind::Compositional };
            let id = match kind {
                RuleKind::Lexical => {
                    lexical += 1;
                    format!("L{lexical}")
                }
                RuleKind::Compositional => {
                    compositional += 1;
                    format!("C{compositional}")
                }
            };
            rules.push(Rule { id, kind, category: category.to_string(), pattern, sem });
        }
        if !rules.iter().any(|r| r.category == ROOT) {
            return Err(GrammarError::NoRoot);
        }
        let g = Grammar { rules };
        let names: Vec<String> = g.rules.iter().map(|r| r.category.clone()).collect();
        try_unary_order(&g, names)?;
        Ok(g)
    }

    pub fn rule(&self, id: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.id == id)
    }
}

/// Orders `names` so that every unary rule rewrites a category into a later
/// one; ties keep their given order.
pub(crate) fn unary_order(g: &Grammar, names: Vec<String>) -> Vec<String> {
    try_unary_order(g, names).expect("checked when the grammar was read")
}

fn try_unary_order(g: &Grammar, mut names: Vec<String>) -> Result<Vec<String>, GrammarError> {
    let mut edges: Vec<(&str, &str)> = Vec::new();
    for r in &g.rules {
        if let [Symbol::Category(src)] = r.pattern.as_slice() {
            edges.push((src, &r.category));
            for c in [src, &r.category] {
                if !names.contains(c) {
                    names.push(c.clone());
                }
            }
        }
    }
    let mut seen = std::collections::HashSet::new();
    names.retain(|n| seen.insert(n.clone()));
    let mut out = Vec::with_capacity(names.len());
    while !names.is_empty() {
        let free = names
            .iter()
            .position(|n| !edges.iter().any(|(s, t)| t == n && s != n && names.iter().any(|m| m == s)) && !edges.contains(&(n, n)))
            .ok_or_else(|| GrammarError::UnaryCycle(names[0].clone()))?;
        out.push(names.remove(free));
    }
    Ok(out)
}

fn strip_comment(line: &str) -> &str {
    // a `#` inside quotes is part of a literal
    let mut quoted = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => quoted = !quoted,
            '#' if !quoted => return &line[..i],
            _ => {}
        }
    }
    line
}

fn is_category(s: &str) -> bool {
    s.len() > 1 && s.starts_with('$') && s[1..].bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

fn parse_pattern(text: &str) -> Result<Vec<Symbol>, String> {
    let mut out = Vec::new();
    for item in text.split_whitespace() {
        out.push(match item {
            "@int" => Symbol::AnyInt,
            "@lit" => Symbol::AnyLiteral,
            s if s.starts_with('$') => {
                if !is_category(s) {
                    return Err(format!("bad category {s:?}"));
                }
                Symbol::Category(s.to_string())
            }
            s if s.starts_with('@') => return Err(format!("unknown token class {s:?}")),
            s => Symbol::Word(s.to_lowercase()),
        });
    }
    if out.is_empty() {
        return Err("empty pattern".into());
    }
    Ok(out)
}

fn check(e: &SemExpr, pattern: &[Symbol], slots: usize) -> Result<(), String> {
    let mut used = vec![false; slots];
    check_expr(e, pattern, &mut used)?;
    if let Some(k) = used.iter().position(|u| !u) {
        return Err(format!("slot ${} is never used", k + 1));
    }
    if !matches!(e, SemExpr::Call(..)) {
        return Err("the semantic function must be a call".into());
    }
    Ok(())
}

fn check_expr(e: &SemExpr, pattern: &[Symbol], used: &mut [bool]) -> Result<(), String> {
    match e {
        SemExpr::Slot(k) => match used.get_mut(k.wrapping_sub(1)) {
            Some(u) => {
                *u = true;
                Ok(())
            }
            None => Err(format!("slot ${k} out of range")),
        },
        SemExpr::Int(_) => Ok(()),
        SemExpr::Name(n) => Err(format!("unexpected name {n:?}")),
        SemExpr::Call(f, args) => {
            let (lo, hi) = f.arity();
            if args.len() < lo || args.len() > hi {
                return Err(format!("{f:?} takes {lo}..{hi} arguments, got {}", args.len()));
            }
            match (f, args.first()) {
                (SemFn::CharClass, Some(SemExpr::Name(n))) => {
                    return class_named(n).map(|_| ()).ok_or_else(|| format!("unknown class {n:?}"));
                }
                (SemFn::CharClass, None) if !pattern.contains(&Symbol::AnyLiteral) => {
                    return Err("CharClassFn without a name needs @lit".into());
                }
                (SemFn::Int, None) if !pattern.contains(&Symbol::AnyInt) => {
                    return Err("IntFn without an argument needs @int".into());
                }
                _ => {}
            }
            args.iter().try_for_each(|a| check_expr(a, pattern, used))
        }
    }
}

struct SemParser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl SemParser<'_> {
    fn parse(mut self, slots: usize) -> Result<SemExpr, String> {
        let e = self.expr(Some(slots))?;
        self.ws();
        if self.pos != self.s.len() {
            return Err(format!("trailing input at column {}", self.pos + 1));
        }
        Ok(e)
    }

    fn ws(&mut self) {
        while self.s.get(self.pos).is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, b: u8) -> bool {
        self.ws();
        if self.s.get(self.pos) == Some(&b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn take_while(&mut self, f: impl Fn(u8) -> bool) -> &str {
        let start = self.pos;
        while self.s.get(self.pos).is_some_and(|&b| f(b)) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos]).unwrap_or("")
    }

    /// `default_slots` is set for the outermost call, which may omit its
    /// argument list to mean all slots in order.
    fn expr(&mut self, default_slots: Option<usize>) -> Result<SemExpr, String> {
        self.ws();
        match self.s.get(self.pos) {
            Some(b'$') => {
                self.pos += 1;
                let n = self.take_while(|b| b.is_ascii_digit());
                n.parse().map(SemExpr::Slot).map_err(|_| format!("bad slot at column {}", self.pos + 1))
            }
            Some(b'"') => {
                self.pos += 1;
                let name = self.take_while(|b| b != b'"').to_string();
                if !self.eat(b'"') {
                    return Err("unterminated quote".into());
                }
                Ok(SemExpr::Name(name))
            }
            Some(b) if b.is_ascii_digit() => {
                let n = self.take_while(|b| b.is_ascii_digit());
                n.parse().map(SemExpr::Int).map_err(|_| "integer out of range".into())
            }
            Some(b) if b.is_ascii_alphabetic() => {
                let name = self.take_while(|b| b.is_ascii_alphanumeric() || b == b'_').to_string();
                if !name.ends_with("Fn") {
                    return Ok(SemExpr::Name(name));
                }
                let f = SemFn::from_name(&name).ok_or_else(|| format!("unknown semantic function {name}"))?;
                if !self.eat(b'(') {
                    let args = match (f, default_slots) {
                        (SemFn::Int | SemFn::CharClass, _) => Vec::new(),
                        (_, Some(n)) => (1..=n).map(SemExpr::Slot).collect(),
                        (_, None) => return Err(format!("{name} needs arguments here")),
                    };
                    return Ok(SemExpr::Call(f, args));
                }
                let mut args = Vec::new();
                if !self.eat(b')') {
                    loop {
                        args.push(self.expr(None)?);
                        if self.eat(b')') {
                            break;
                        }
                        if !self.eat(b',') {
                            return Err(format!("expected `,` or `)` at column {}", self.pos + 1));
                        }
                    }
                }
                Ok(SemExpr::Call(f, args))
            }
            _ => Err(format!("unexpected input at column {}", self.pos + 1)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sketch::parse_sketch;

    fn sk(s: &str) -> Value {
        Value::Sketch(parse_sketch(s).unwrap())
    }

    #[test]
    fn rule_lines() {
        let g = Grammar::parse(
            "# demo\n$PROGRAM -> digits :: CharClassFn(num)\n$INT -> @int :: IntFn\n\
             $PROGRAM -> max $INT $PROGRAM :: RepeatRangeFn($2, 1, $1)\n$ROOT -> $PROGRAM :: SketchFn\n",
        )
        .unwrap();
        let ids: Vec<&str> = g.rules.iter().map(|r| r.id.as_str()).collect();
        assert_eq!(ids, ["L1", "L2", "C1", "C2"]);
        assert_eq!(g.rules[2].slots(), 2);
        assert!(g.rules[3].is_unary());
        let rr = g.rules[2].apply(&[&Value::Int(3), &sk("<num>")], &[]).unwrap();
        assert_eq!(rr, sk("RepeatRange(<num>,1,3)"));
        let fifteen = Token::Word("15".into());
        assert_eq!(g.rules[1].apply(&[], &[&fifteen]), Some(Value::Int(15)));
    }

    #[test]
    fn sketch_fn_merges_hints() {
        let g = Grammar::parse("$ROOT -> $A $B :: ConcatFn(SketchFn($1, $2), SketchFn($2))").unwrap();
        let v = g.rules[0].apply(&[&sk("?{<num>}"), &sk("<,>")], &[]).unwrap();
        assert_eq!(v, sk("Concat(?{<,>,<num>},?{<,>})"));
    }

    #[test]
    fn errors_name_the_line() {
        let bad = Grammar::parse("$ROOT -> x :: IdentityFn\n$A -> $B :: NopeFn");
        assert!(matches!(bad, Err(GrammarError::Syntax { line: 1, .. })));
        assert!(matches!(Grammar::parse("$A -> $B :: NopeFn"), Err(GrammarError::Syntax { line: 1, .. })));
        assert!(matches!(Grammar::parse("$A -> $B $C :: IdentityFn($1)"), Err(GrammarError::Syntax { .. })));
        assert_eq!(Grammar::parse("$A -> x :: CharClassFn(num)"), Err(GrammarError::NoRoot));
    }
}
