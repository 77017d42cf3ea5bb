use thiserror::Error;

use super::{BinaryOp, CharClass, Regex, RepeatOp, Repetition, UnaryOp};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("integer argument at offset {pos} must be positive")]
    NonPositive { pos: usize },
    #[error("RepeatRange bounds at offset {pos} are out of order ({lo} > {hi})")]
    BadRange { pos: usize, lo: u32, hi: u32 },
    #[error("empty hint list at offset {pos}")]
    EmptyHints { pos: usize },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            ParseError::Syntax { pos, .. }
            | ParseError::NonPositive { pos }
            | ParseError::BadRange { pos, .. }
            | ParseError::EmptyHints { pos } => *pos,
        }
    }
}

/// An operator name recognised by the function-call syntax.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpName {
    Unary(UnaryOp),
    Binary(BinaryOp),
    Repeat(RepeatOp),
}

impl OpName {
    pub fn lookup(name: &str) -> Option<OpName> {
        UnaryOp::ALL
            .iter()
            .find(|op| op.name() == name)
            .map(|&op| OpName::Unary(op))
            .or_else(|| BinaryOp::ALL.iter().find(|op| op.name() == name).map(|&op| OpName::Binary(op)))
            .or_else(|| RepeatOp::ALL.iter().find(|op| op.name() == name).map(|&op| OpName::Repeat(op)))
    }
}

/// Cursor over the concrete syntax shared by regexes and sketches.
pub struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    pub fn new(text: &'a str) -> Self {
        Parser { src: text.as_bytes(), pos: 0 }
    }

    pub fn pos(&self) -> usize {
        self.pos
    }

    pub fn error(&self, msg: impl Into<String>) -> ParseError {
        ParseError::Syntax { pos: self.pos, msg: msg.into() }
    }

    pub fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    pub fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    pub fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, b: u8) -> Result<(), ParseError> {
        if self.eat(b) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{}'", b as char)))
        }
    }

    pub fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    pub fn finish(&mut self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error("trailing input"))
        }
    }

    pub fn ident(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        if self.pos == start {
            None
        } else {
            std::str::from_utf8(&self.src[start..self.pos]).ok()
        }
    }

    /// Decimal integer; zero is rejected since every DSL integer is positive.
    pub fn positive_int(&mut self) -> Result<u32, ParseError> {
        self.skip_ws();
        let start = self.pos;
        if self.src.get(self.pos) == Some(&b'-') {
            return Err(ParseError::NonPositive { pos: start });
        }
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.error("expected an integer"));
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let value: u32 = text
            .parse()
            .map_err(|_| ParseError::Syntax { pos: start, msg: "integer out of range".into() })?;
        if value == 0 {
            return Err(ParseError::NonPositive { pos: start });
        }
        Ok(value)
    }

    /// `<name>` or `<c>`. Whitespace inside the brackets is significant.
    pub fn char_class(&mut self) -> Result<CharClass, ParseError> {
        self.skip_ws();
        let start = self.pos;
        if self.src.get(self.pos) != Some(&b'<') {
            return Err(self.error("expected '<'"));
        }
        let rest = &self.src[self.pos + 1..];
        if let Some(close) = rest.iter().position(|&b| b == b'>') {
            if close > 1 {
                if let Some(class) = std::str::from_utf8(&rest[..close]).ok().and_then(CharClass::from_name) {
                    self.pos += close + 2;
                    return Ok(class);
                }
            }
        }
        match rest {
            [c, b'>', ..] if c.is_ascii() => {
                self.pos += 3;
                Ok(CharClass::Literal(*c))
            }
            _ => Err(ParseError::Syntax { pos: start, msg: "malformed character class".into() }),
        }
    }
}

/// Parses the function-call syntax, e.g. `Concat(<num>,RepeatRange(<a>,1,3))`.
pub fn parse_regex(text: &str) -> Result<Regex, ParseError> {
    let mut p = Parser::new(text);
    let r = regex(&mut p)?;
    p.finish()?;
    Ok(r)
}

pub(crate) fn regex(p: &mut Parser<'_>) -> Result<Regex, ParseError> {
    match p.peek() {
        None => Err(p.error("unexpected end of input")),
        Some(b'<') => Ok(Regex::Class(p.char_class()?)),
        Some(_) => {
            let start = p.pos();
            let name = p.ident().ok_or_else(|| p.error("expected a regex"))?;
            match name {
                "eps" => return Ok(Regex::Epsilon),
                "null" => return Ok(Regex::EmptySet),
                _ => {}
            }
            let op = OpName::lookup(name)
                .ok_or_else(|| ParseError::Syntax { pos: start, msg: format!("unknown operator '{name}'") })?;
            p.expect(b'(')?;
            let r = match op {
                OpName::Unary(op) => Regex::unary(op, regex(p)?),
                OpName::Binary(op) => {
                    let a = regex(p)?;
                    p.expect(b',')?;
                    Regex::binary(op, a, regex(p)?)
                }
                OpName::Repeat(op) => {
                    let arg = regex(p)?;
                    let mut ints = Vec::new();
                    for _ in 0..op.int_arity() {
                        p.expect(b',')?;
                        ints.push(p.positive_int()?);
                    }
                    if let [lo, hi] = ints[..] {
                        if lo > hi {
                            return Err(ParseError::BadRange { pos: start, lo, hi });
                        }
                    }
                    Regex::Repeat(Box::new(arg), Repetition::from_op(op, &ints).unwrap())
                }
            };
            p.expect(b')')?;
            Ok(r)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regex::CharClass::*;

    #[test]
    fn parses_examples() {
        assert_eq!(
            parse_regex("Concat(<num>,<,>)").unwrap(),
            Regex::concat(Regex::Class(Num), Regex::Class(Literal(b',')))
        );
        assert_eq!(
            parse_regex("RepeatRange(<num>,1,3)").unwrap(),
            Regex::repeat_range(Regex::Class(Num), 1, 3)
        );
        assert_eq!(parse_regex("eps").unwrap(), Regex::Epsilon);
        assert_eq!(parse_regex("null").unwrap(), Regex::EmptySet);
    }

    #[test]
    fn literal_edge_cases() {
        assert_eq!(parse_regex("<<>").unwrap(), Regex::Class(Literal(b'<')));
        assert_eq!(parse_regex("<>>").unwrap(), Regex::Class(Literal(b'>')));
        assert_eq!(parse_regex("< >").unwrap(), Regex::Class(Literal(b' ')));
        assert_eq!(parse_regex("<n>").unwrap(), Regex::Class(Literal(b'n')));
        assert_eq!(parse_regex("<num>").unwrap(), Regex::Class(Num));
    }

    #[test]
    fn rejects_zero_and_bad_ranges() {
        assert!(matches!(parse_regex("Repeat(<num>,0)"), Err(ParseError::NonPositive { .. })));
        assert!(matches!(parse_regex("RepeatRange(<num>,3,1)"), Err(ParseError::BadRange { lo: 3, hi: 1, .. })));
        assert!(matches!(parse_regex("Repeat(<num>,-2)"), Err(ParseError::NonPositive { .. })));
    }

    #[test]
    fn reports_positions() {
        let err = parse_regex("Concat(<num>;<let>)").unwrap_err();
        assert_eq!(err.position(), 12);
        let err = parse_regex("Frob(<num>)").unwrap_err();
        assert_eq!(err.position(), 0);
        assert!(parse_regex("Concat(<num>,<let>) x").is_err());
        assert!(parse_regex("").is_err());
    }
}
