use std::fmt;

/// A lowercased word or the contents of a double-quoted literal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Token {
    Word(String),
    Literal(String),
}

impl Token {
    pub fn as_int(&self) -> Option<u32> {
        match self {
            Token::Word(w) if w.bytes().all(|b| b.is_ascii_digit()) => w.parse().ok(),
            _ => None,
        }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Word(w) => f.write_str(w),
            Token::Literal(l) => write!(f, "\"{l}\""),
        }
    }
}

/// Splits on whitespace and punctuation. Text between double quotes is kept
/// verbatim as one literal token; an unterminated quote runs to the end.
pub fn tokenize(text: &str) -> Vec<Token> {
    let mut out = Vec::new();
    let mut word = String::new();
    let mut chars = text.chars();
    let flush = |word: &mut String, out: &mut Vec<Token>| {
        if !word.is_empty() {
            out.push(Token::Word(std::mem::take(word)));
        }
    };
    while let Some(c) = chars.next() {
        if c == '"' {
            flush(&mut word, &mut out);
            let lit: String = chars.by_ref().take_while(|&c| c != '"').collect();
            if !lit.is_empty() {
                out.push(Token::Literal(lit));
            }
        } else if c.is_alphanumeric() {
            word.extend(c.to_lowercase());
        } else {
            flush(&mut word, &mut out);
        }
    }
    flush(&mut word, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn words_numbers_and_literals() {
        let toks = tokenize("Max 15 digits, then \",\" or \"ab c\"!");
        let shown: Vec<String> = toks.iter().map(|t| t.to_string()).collect();
        assert_eq!(shown, ["max", "15", "digits", "then", "\",\"", "or", "\"ab c\""]);
        assert_eq!(toks[1].as_int(), Some(15));
        assert_eq!(toks[0].as_int(), None);
    }
}
