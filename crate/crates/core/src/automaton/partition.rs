use crate::regex::{CharClass, CharSet, Regex, ALPHABET_SIZE};

/// Disjoint character blocks covering the alphabet.
///
/// Each block is a minterm of the character classes the partition was
/// built from, so every class is a union of blocks. Blocks are ordered by
/// their smallest character.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    blocks: Vec<CharSet>,
    block_of: Vec<u8>,
}

impl Partition {
    pub fn for_classes<I: IntoIterator<Item = CharClass>>(classes: I) -> Self {
        let mut blocks = vec![CharSet::FULL];
        for class in classes {
            let set = class.chars();
            let mut next = Vec::with_capacity(blocks.len() + 1);
            for b in blocks {
                let inside = b.intersect(set);
                let outside = b.intersect(set.complement());
                if !inside.is_empty() {
                    next.push(inside);
                }
                if !outside.is_empty() {
                    next.push(outside);
                }
            }
            blocks = next;
        }
        blocks.sort_by_key(|b| b.first());
        let mut block_of = vec![0u8; ALPHABET_SIZE];
        for (i, b) in blocks.iter().enumerate() {
            for c in b.iter() {
                block_of[c as usize] = i as u8;
            }
        }
        Partition { blocks, block_of }
    }

    pub fn for_regexes(regexes: &[&Regex]) -> Self {
        let mut classes = Vec::new();
        for r in regexes {
            r.classes(&mut classes);
        }
        classes.sort();
        Partition::for_classes(classes)
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn blocks(&self) -> &[CharSet] {
        &self.blocks
    }

    pub fn block_of(&self, b: u8) -> Option<usize> {
        self.block_of.get(b as usize).map(|&i| i as usize)
    }

    /// Bit mask of the blocks making up `class`.
    pub fn mask(&self, class: CharClass) -> u128 {
        let set = class.chars();
        self.blocks
            .iter()
            .enumerate()
            .filter(|(_, b)| !b.intersect(set).is_empty())
            .fold(0u128, |m, (i, _)| m | 1u128 << i)
    }

    pub fn full_mask(&self) -> u128 {
        if self.blocks.len() == 128 {
            u128::MAX
        } else {
            (1u128 << self.blocks.len()) - 1
        }
    }
}
