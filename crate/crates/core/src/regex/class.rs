use std::fmt;

/// Size of the alphabet: the 128 ASCII code points.
pub const ALPHABET_SIZE: usize = 128;

/// A set of ASCII characters, one bit per code point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct CharSet(u128);

impl CharSet {
    pub const EMPTY: CharSet = CharSet(0);
    pub const FULL: CharSet = CharSet(u128::MAX);

    pub fn singleton(b: u8) -> Self {
        debug_assert!(b < 128);
        CharSet(1u128 << b)
    }

    pub fn range(lo: u8, hi: u8) -> Self {
        let mut set = 0u128;
        for b in lo..=hi {
            set |= 1u128 << b;
        }
        CharSet(set)
    }

    pub fn contains(self, b: u8) -> bool {
        b < 128 && self.0 >> b & 1 == 1
    }

    pub fn union(self, other: CharSet) -> CharSet {
        CharSet(self.0 | other.0)
    }

    pub fn intersect(self, other: CharSet) -> CharSet {
        CharSet(self.0 & other.0)
    }

    pub fn complement(self) -> CharSet {
        CharSet(!self.0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Smallest code point in the set.
    pub fn first(self) -> Option<u8> {
        if self.0 == 0 {
            None
        } else {
            Some(self.0.trailing_zeros() as u8)
        }
    }

    pub fn iter(self) -> impl Iterator<Item = u8> {
        (0u8..128).filter(move |&b| self.contains(b))
    }
}

/// A character class of the DSL. Every class matches strings of length one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CharClass {
    Literal(u8),
    Num,
    Let,
    Cap,
    Low,
    Any,
    Alphanum,
    Hex,
}

impl CharClass {
    /// The named classes, in canonical order.
    pub const NAMED: [CharClass; 7] = [
        CharClass::Num,
        CharClass::Let,
        CharClass::Cap,
        CharClass::Low,
        CharClass::Any,
        CharClass::Alphanum,
        CharClass::Hex,
    ];

    pub fn chars(self) -> CharSet {
        let digits = CharSet::range(b'0', b'9');
        let upper = CharSet::range(b'A', b'Z');
        let lower = CharSet::range(b'a', b'z');
        match self {
            CharClass::Literal(b) => CharSet::singleton(b),
            CharClass::Num => digits,
            CharClass::Let => upper.union(lower),
            CharClass::Cap => upper,
            CharClass::Low => lower,
            CharClass::Any => CharSet::FULL,
            CharClass::Alphanum => digits.union(upper).union(lower),
            CharClass::Hex => digits
                .union(CharSet::range(b'a', b'f'))
                .union(CharSet::range(b'A', b'F')),
        }
    }

    pub fn matches(self, b: u8) -> bool {
        self.chars().contains(b)
    }

    pub fn name(self) -> Option<&'static str> {
        match self {
            CharClass::Literal(_) => None,
            CharClass::Num => Some("num"),
            CharClass::Let => Some("let"),
            CharClass::Cap => Some("cap"),
            CharClass::Low => Some("low"),
            CharClass::Any => Some("any"),
            CharClass::Alphanum => Some("alphanum"),
            CharClass::Hex => Some("hex"),
        }
    }

    pub fn from_name(name: &str) -> Option<CharClass> {
        CharClass::NAMED
            .iter()
            .copied()
            .find(|c| c.name() == Some(name))
    }
}

impl fmt::Display for CharClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CharClass::Literal(b) => write!(f, "<{}>", *b as char),
            named => write!(f, "<{}>", named.name().unwrap()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_contents() {
        assert_eq!(CharClass::Num.chars().iter().count(), 10);
        assert_eq!(CharClass::Let.chars().iter().count(), 52);
        assert_eq!(CharClass::Alphanum.chars().iter().count(), 62);
        assert_eq!(CharClass::Hex.chars().iter().count(), 22);
        assert_eq!(CharClass::Any.chars().iter().count(), 128);
        assert!(CharClass::Literal(b',').matches(b','));
        assert!(!CharClass::Cap.matches(b'a'));
    }

    #[test]
    fn first_char() {
        let diff = CharClass::Hex.chars().intersect(CharClass::Num.chars().complement());
        assert_eq!(diff.first(), Some(b'A'));
    }
}
