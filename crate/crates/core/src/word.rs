//! Finite and two-sided 0/1 words, lexicographic order, admissibility and
//! block parsing at `0^n` separators.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::BetaParams;

/// A finite word over {0, 1}. Bits are stored one per byte.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitWord {
    bits: Vec<u8>,
}

impl BitWord {
    pub fn new() -> Self {
        Self::default()
    }

    /// Panics if any entry is not 0 or 1.
    pub fn from_bits(bits: Vec<u8>) -> Self {
        assert!(bits.iter().all(|&b| b <= 1), "bits must be 0 or 1");
        BitWord { bits }
    }

    pub fn parse(s: &str) -> Result<Self> {
        s.bytes()
            .map(|c| match c {
                b'0' => Ok(0),
                b'1' => Ok(1),
                _ => Err(Error::Parse(format!(
                    "invalid symbol {:?} in word (expected '0' or '1')",
                    c as char
                ))),
            })
            .collect::<Result<Vec<u8>>>()
            .map(|bits| BitWord { bits })
    }

    pub fn zeros(len: usize) -> Self {
        BitWord { bits: vec![0; len] }
    }

    pub fn ones(len: usize) -> Self {
        BitWord { bits: vec![1; len] }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub(crate) fn bits_mut(&mut self) -> &mut [u8] {
        &mut self.bits
    }

    pub fn into_bits(self) -> Vec<u8> {
        self.bits
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    pub fn concat(&self, other: &BitWord) -> BitWord {
        let mut bits = self.bits.clone();
        bits.extend_from_slice(&other.bits);
        BitWord { bits }
    }

    pub fn repeat(&self, k: usize) -> BitWord {
        BitWord {
            bits: self.bits.repeat(k),
        }
    }

    pub fn slice(&self, start: usize, end: usize) -> BitWord {
        BitWord {
            bits: self.bits[start..end].to_vec(),
        }
    }
}

impl fmt::Display for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.bits.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitWord(\"{self}\")")
    }
}

impl Serialize for BitWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl std::str::FromStr for BitWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl From<&[u8]> for BitWord {
    fn from(bits: &[u8]) -> Self {
        Self::from_bits(bits.to_vec())
    }
}

/// A finite window of a two-sided sequence.
///
/// `origin` counts the symbols at coordinates `<= 0`, so the symbol at vector
/// index `i` has coordinate `i + 1 - origin` and coordinate 0 is the last
/// symbol before the `|` of the text form `past|future`. `origin` is signed
/// and unbounded: shifting may move the origin outside the stored window.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TwoSidedWord {
    bits: Vec<u8>,
    origin: i64,
}

impl TwoSidedWord {
    pub fn new(past: &BitWord, future: &BitWord) -> Self {
        let mut bits = past.bits.clone();
        bits.extend_from_slice(&future.bits);
        TwoSidedWord {
            bits,
            origin: past.len() as i64,
        }
    }

    pub fn from_parts(bits: Vec<u8>, origin: i64) -> Self {
        assert!(bits.iter().all(|&b| b <= 1), "bits must be 0 or 1");
        TwoSidedWord { bits, origin }
    }

    /// Parses `past|future`.
    pub fn parse(s: &str) -> Result<Self> {
        let (past, future) = s
            .split_once('|')
            .ok_or_else(|| Error::Parse("two-sided word needs a '|' origin marker".into()))?;
        Ok(Self::new(&BitWord::parse(past)?, &BitWord::parse(future)?))
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn origin(&self) -> i64 {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Vector index holding coordinate `c`, if it lies inside the window.
    pub fn index_of(&self, c: i64) -> Option<usize> {
        let i = c.checked_add(self.origin)?.checked_sub(1)?;
        (0..self.bits.len() as i64).contains(&i).then_some(i as usize)
    }

    pub fn coordinate_of(&self, index: usize) -> i64 {
        index as i64 + 1 - self.origin
    }

    pub fn get(&self, c: i64) -> Option<u8> {
        self.index_of(c).map(|i| self.bits[i])
    }

    /// Range of coordinates covered by the window (inclusive).
    pub fn coordinate_range(&self) -> (i64, i64) {
        (1 - self.origin, self.bits.len() as i64 - self.origin)
    }

    /// `shift(w, k)` relabels coordinates so that coordinate `c` of `w` is
    /// coordinate `c - k` of the result (k applications of the left shift).
    pub fn shift(&self, k: i64) -> TwoSidedWord {
        TwoSidedWord {
            bits: self.bits.clone(),
            origin: self.origin.checked_add(k).expect("origin overflow"),
        }
    }

    pub fn past(&self) -> BitWord {
        let end = self.origin.clamp(0, self.bits.len() as i64) as usize;
        BitWord::from_bits(self.bits[..end].to_vec())
    }

    pub fn future(&self) -> BitWord {
        let start = self.origin.clamp(0, self.bits.len() as i64) as usize;
        BitWord::from_bits(self.bits[start..].to_vec())
    }
}

impl fmt::Display for TwoSidedWord {
    /// Windows whose origin lies outside the stored bits render with the
    /// marker clamped to the nearest end.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", self.past(), self.future())
    }
}

impl fmt::Debug for TwoSidedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TwoSidedWord(\"{self}\", origin={})", self.origin)
    }
}

/// Lexicographic order of equal-length words.
pub fn lex_compare(u: &BitWord, v: &BitWord) -> Result<Ordering> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch(u.len(), v.len()));
    }
    Ok(u.bits.cmp(&v.bits))
}

/// True iff `bits` has no factor `0 1^n`; runs of `n` or more ones may only
/// appear as a prefix.
pub(crate) fn is_normal_bits(bits: &[u8], n: usize) -> bool {
    let mut seen_zero = false;
    let mut run = 0usize;
    for &b in bits {
        if b == 1 {
            run += 1;
            if seen_zero && run >= n {
                return false;
            }
        } else {
            seen_zero = true;
            run = 0;
        }
    }
    true
}

pub fn is_normal_form(w: &BitWord, params: &BetaParams) -> bool {
    is_normal_bits(&w.bits, params.order())
}

/// Start positions of the separators `0^n` chosen by the block scan: the
/// first occurrence, then the next occurrence starting at or after the end of
/// the previous one, and so on.
pub(crate) fn separator_starts(bits: &[u8], n: usize) -> Vec<usize> {
    let mut starts = Vec::new();
    let mut zeros = 0usize;
    let mut i = 0usize;
    while i < bits.len() {
        if bits[i] == 0 {
            zeros += 1;
            if zeros == n {
                starts.push(i + 1 - n);
                zeros = 0;
            }
        } else {
            zeros = 0;
        }
        i += 1;
    }
    starts
}

/// A word cut into blocks; every block after the first starts with `0^n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockDecomposition {
    pub blocks: Vec<BitWord>,
    pub separator_len: usize,
    /// The trailing block is always incomplete: its next separator lies
    /// beyond the end of the word.
    pub last_incomplete: bool,
}

impl BlockDecomposition {
    pub fn concat(&self) -> BitWord {
        let mut bits = Vec::new();
        for b in &self.blocks {
            bits.extend_from_slice(b.bits());
        }
        BitWord::from_bits(bits)
    }
}

pub fn parse_blocks(w: &BitWord, params: &BetaParams) -> BlockDecomposition {
    let n = params.order();
    let mut cuts: Vec<usize> = separator_starts(&w.bits, n)
        .into_iter()
        .filter(|&s| s > 0)
        .collect();
    cuts.insert(0, 0);
    cuts.push(w.len());
    let blocks = cuts
        .windows(2)
        .filter(|c| c[1] > c[0])
        .map(|c| w.slice(c[0], c[1]))
        .collect::<Vec<_>>();
    BlockDecomposition {
        last_incomplete: !blocks.is_empty(),
        blocks,
        separator_len: n,
    }
}
