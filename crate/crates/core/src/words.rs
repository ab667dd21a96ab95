//! Square detection and square-free word generation.
//!
//! A *square* is a non-empty factor of the form `XX`. A word with no square
//! factor is square-free (non-repetitive).

use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

/// A colour index. Alphabets in this crate are tiny, so a byte is plenty.
pub type Symbol = u8;

/// A finite word over a small integer alphabet.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(Vec<Symbol>);

impl Word {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        Word(symbols)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn as_slice(&self) -> &[Symbol] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Symbol> {
        self.0
    }

    pub fn push(&mut self, s: Symbol) {
        self.0.push(s);
    }

    /// The word read backwards.
    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    /// True when every symbol is below `alphabet`.
    pub fn fits_alphabet(&self, alphabet: usize) -> bool {
        self.0.iter().all(|&s| (s as usize) < alphabet)
    }

    pub fn is_square_free(&self) -> bool {
        find_square(&self.0).is_none()
    }
}

impl Deref for Word {
    type Target = [Symbol];

    fn deref(&self) -> &[Symbol] {
        &self.0
    }
}

impl From<Vec<Symbol>> for Word {
    fn from(v: Vec<Symbol>) -> Self {
        Word(v)
    }
}

impl From<&[Symbol]> for Word {
    fn from(v: &[Symbol]) -> Self {
        Word(v.to_vec())
    }
}

impl FromIterator<Symbol> for Word {
    fn from_iter<I: IntoIterator<Item = Symbol>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Position of a square `w[start..start + 2 * half_len]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquareOccurrence {
    pub start: usize,
    pub half_len: usize,
}

/// Finds the leftmost square factor of `w`, and among those starting at the
/// leftmost position the shortest one.
pub fn find_square(w: &[Symbol]) -> Option<SquareOccurrence> {
    let n = w.len();
    for start in 0..n {
        for half_len in 1..=(n - start) / 2 {
            let (a, b) = w[start..start + 2 * half_len].split_at(half_len);
            if a == b {
                return Some(SquareOccurrence { start, half_len });
            }
        }
    }
    None
}

/// True when the whole word is a square `XX` with `X` non-empty.
#[inline]
pub fn is_square(w: &[Symbol]) -> bool {
    let n = w.len();
    n >= 2 && n.is_multiple_of(2) && w[..n / 2] == w[n / 2..]
}

/// Prefix of length `n` of the ternary square-free word fixed by the
/// morphism `2 -> 210, 1 -> 20, 0 -> 1`.
///
/// This is the word of Thue–Morse run lengths (the number of `1`s between
/// consecutive `0`s of the Thue–Morse sequence), starting `2102012…`.
pub fn thue_word(n: usize) -> Word {
    let mut w: Vec<Symbol> = vec![2];
    while w.len() < n {
        let mut next = Vec::with_capacity(w.len() * 3);
        for &s in &w {
            match s {
                2 => next.extend_from_slice(&[2, 1, 0]),
                1 => next.extend_from_slice(&[2, 0]),
                _ => next.push(1),
            }
        }
        w = next;
    }
    w.truncate(n);
    Word(w)
}
