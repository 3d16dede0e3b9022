//! Reduced words in a free group on `k` generators.
//!
//! Letters are signed generator indices `±1, …, ±k`. The alphabet is
//! ordered `1 < −1 < 2 < −2 < ⋯`, and words are enumerated length-first,
//! then lexicographically in that order.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WordError {
    #[error("letter {0} is not a signed generator index")]
    BadLetter(String),
    #[error("word is not reduced at position {0}")]
    NotReduced(usize),
}

/// A generator `j` (positive) or its inverse (negative); never zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter(i8);

impl Letter {
    pub fn new(signed: i8) -> Option<Self> {
        (signed != 0).then_some(Self(signed))
    }

    /// Letter with alphabet position `code` (`2j` is generator `j+1`,
    /// `2j+1` its inverse).
    pub fn from_code(code: usize) -> Self {
        let j = (code / 2 + 1) as i8;
        Self(if code.is_multiple_of(2) { j } else { -j })
    }

    pub fn code(self) -> usize {
        let j = self.0.unsigned_abs() as usize - 1;
        2 * j + usize::from(self.0 < 0)
    }

    pub fn signed(self) -> i8 {
        self.0
    }

    /// Zero-based generator index.
    pub fn generator(self) -> usize {
        self.0.unsigned_abs() as usize - 1
    }

    pub fn is_inverse(self) -> bool {
        self.0 < 0
    }

    pub fn inverse(self) -> Self {
        Self(-self.0)
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        self.code().cmp(&other.code())
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A reduced word. Ordered length-first, then lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn from_letters(letters: Vec<Letter>) -> Result<Self, WordError> {
        if let Some(pos) = letters.windows(2).position(|w| w[0] == w[1].inverse()) {
            return Err(WordError::NotReduced(pos + 1));
        }
        Ok(Self(letters))
    }

    pub fn from_signed(signed: &[i8]) -> Result<Self, WordError> {
        let letters = signed
            .iter()
            .map(|&s| Letter::new(s).ok_or_else(|| WordError::BadLetter(s.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_letters(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<Letter> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    pub fn inverse(&self) -> Self {
        Self(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// Free reduction of `self · other`.
    pub fn concat_reduced(&self, other: &Self) -> Self {
        let mut out = self.0.clone();
        for &l in &other.0 {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Self(out)
    }

    pub(crate) fn push(&mut self, l: Letter) {
        debug_assert!(self.0.last() != Some(&l.inverse()));
        self.0.push(l);
    }

    #[cfg(test)]
    pub(crate) fn pop(&mut self) -> Option<Letter> {
        self.0.pop()
    }

    /// Replaces every letter through a permutation of the alphabet codes.
    pub fn relabeled(&self, code_map: &[usize]) -> Self {
        Self(self.0.iter().map(|l| Letter::from_code(code_map[l.code()])).collect())
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Comma-separated signed indices; the identity is the empty string.
impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", l.0)?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Self::empty());
        }
        let signed = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<i8>()
                    .map_err(|_| WordError::BadLetter(t.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_signed(&signed)
    }
}

/// Number of reduced words of length `n` on `k` generators.
pub fn reduced_word_count(k: usize, n: usize) -> u64 {
    if n == 0 {
        1
    } else {
        2 * k as u64 * (2 * k as u64 - 1).pow(n as u32 - 1)
    }
}

/// Restartable stream of all reduced words of lengths `min_len..=max_len`,
/// length-then-lexicographic, optionally restricted to a fixed prefix.
#[derive(Debug, Clone)]
pub struct ReducedWords {
    k: usize,
    max_len: usize,
    prefix: Vec<usize>,
    codes: Vec<usize>,
    done: bool,
}

impl ReducedWords {
    pub fn new(k: usize, max_len: usize) -> Self {
        Self::with_prefix(k, 1, max_len, &Word::empty())
    }

    /// Words `w` with `prefix` as a prefix and `min_len <= |w| <= max_len`.
    /// Splitting by first letter gives independent sub-streams.
    pub fn with_prefix(k: usize, min_len: usize, max_len: usize, prefix: &Word) -> Self {
        let prefix: Vec<usize> = prefix.letters().iter().map(|l| l.code()).collect();
        let start = min_len.max(prefix.len());
        let mut it = Self {
            k,
            max_len,
            prefix,
            codes: Vec::new(),
            done: k == 0,
        };
        if !it.done {
            it.reset_to_length(start);
        }
        it
    }

    fn reset_to_length(&mut self, len: usize) {
        if len > self.max_len {
            self.done = true;
            return;
        }
        self.codes.clear();
        self.codes.extend_from_slice(&self.prefix);
        while self.codes.len() < len {
            let next = self.min_after(self.codes.last().copied());
            self.codes.push(next);
        }
    }

    /// Smallest code allowed after `prev` (anything but its inverse).
    fn min_after(&self, prev: Option<usize>) -> usize {
        usize::from(prev == Some(1))
    }

    /// Advances position `pos` to its next admissible code; false on overflow.
    fn bump(&mut self, pos: usize) -> bool {
        let prev = (pos > 0).then(|| self.codes[pos - 1]);
        let mut c = self.codes[pos] + 1;
        if prev.map(|p| p ^ 1) == Some(c) {
            c += 1;
        }
        if c >= 2 * self.k {
            return false;
        }
        self.codes[pos] = c;
        true
    }

    fn advance(&mut self) {
        let len = self.codes.len();
        let fixed = self.prefix.len();
        let mut pos = len;
        loop {
            if pos == fixed {
                self.reset_to_length(len + 1);
                return;
            }
            pos -= 1;
            if self.bump(pos) {
                for p in pos + 1..len {
                    self.codes[p] = self.min_after(Some(self.codes[p - 1]));
                }
                return;
            }
        }
    }
}

impl Iterator for ReducedWords {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if self.done {
            return None;
        }
        let w = Word(self.codes.iter().map(|&c| Letter::from_code(c)).collect());
        if self.codes.is_empty() {
            // the empty word only appears when min_len = 0 and no prefix
            self.reset_to_length(1);
        } else {
            self.advance();
        }
        Some(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_reduced(w: &Word) -> bool {
        w.letters().windows(2).all(|p| p[0] != p[1].inverse())
    }

    #[test]
    fn counts_for_two_generators() {
        assert_eq!(ReducedWords::new(2, 1).count(), 4);
        assert_eq!(ReducedWords::new(2, 2).count(), 16);
        assert_eq!(ReducedWords::new(2, 5).count() as u64, (1..=5).map(|n| reduced_word_count(2, n)).sum::<u64>());
        assert_eq!(ReducedWords::new(3, 4).count() as u64, (1..=4).map(|n| reduced_word_count(3, n)).sum::<u64>());
    }

    #[test]
    fn cyclic_group_words() {
        let words: Vec<String> = ReducedWords::new(1, 3).map(|w| w.to_string()).collect();
        assert_eq!(words, ["1", "-1", "1,1", "-1,-1", "1,1,1", "-1,-1,-1"]);
    }

    #[test]
    fn words_are_reduced_unique_and_sorted() {
        let words: Vec<Word> = ReducedWords::new(2, 6).collect();
        assert!(words.iter().all(is_reduced));
        assert!(words.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn prefix_streams_partition_the_stream() {
        let all: Vec<Word> = ReducedWords::new(2, 5).collect();
        let mut split: Vec<Word> = (0..4)
            .flat_map(|c| {
                let prefix = Word(vec![Letter::from_code(c)]);
                ReducedWords::with_prefix(2, 1, 5, &prefix)
            })
            .collect();
        split.sort();
        assert_eq!(all, split);
    }

    #[test]
    fn zero_min_length_yields_identity_first() {
        let mut it = ReducedWords::with_prefix(2, 0, 1, &Word::empty());
        assert_eq!(it.next(), Some(Word::empty()));
        assert_eq!(it.count(), 4);
    }

    #[test]
    fn parse_display_round_trip() {
        let w: Word = "1,-2,-2,1".parse().unwrap();
        assert_eq!(w.to_string(), "1,-2,-2,1");
        assert_eq!("".parse::<Word>().unwrap(), Word::empty());
        assert!("1,-1".parse::<Word>().is_err());
        assert!("0".parse::<Word>().is_err());
    }

    #[test]
    fn inverse_and_reduction() {
        let w: Word = "1,2,-1".parse().unwrap();
        assert!(w.concat_reduced(&w.inverse()).is_empty());
        let u: Word = "1,2".parse().unwrap();
        let v: Word = "-2,1".parse().unwrap();
        assert_eq!(u.concat_reduced(&v).to_string(), "1,1");
    }
}
