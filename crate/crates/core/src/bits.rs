//! Bit sequences and prefix-code set utilities.
//!
//! [`BitString`] is the currency of the whole crate: rule inputs and outputs,
//! termination patterns and encoded payloads are all bit strings. Its derived
//! ordering is the lexicographic order with `0 < 1`, where a proper prefix
//! sorts before its extensions.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A finite sequence of bits. The empty string is the void sequence ε.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct BitString {
    bits: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid bit string {text:?}: expected '0'/'1' characters or '-' for the empty string")]
pub struct ParseBitStringError {
    text: String,
}

impl BitString {
    pub const fn empty() -> Self {
        Self { bits: Vec::new() }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    /// The `len` low bits of `value`, most significant first.
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= 64, "at most 64 bits fit in a u64");
        Self {
            bits: (0..len).rev().map(|k| (value >> k) & 1 == 1).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.bits
    }

    pub fn get(&self, index: usize) -> Option<bool> {
        self.bits.get(index).copied()
    }

    pub fn last(&self) -> Option<bool> {
        self.bits.last().copied()
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = bool> + ExactSizeIterator + '_ {
        self.bits.iter().copied()
    }

    pub fn is_prefix_of(&self, other: &BitString) -> bool {
        is_prefix(self, other)
    }

    pub fn is_suffix_of(&self, other: &BitString) -> bool {
        other.bits.ends_with(&self.bits)
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut bits = Vec::with_capacity(self.len() + other.len());
        bits.extend_from_slice(&self.bits);
        bits.extend_from_slice(&other.bits);
        Self { bits }
    }

    /// `bit` followed by `self`.
    pub fn prepend(&self, bit: bool) -> BitString {
        let mut bits = Vec::with_capacity(self.len() + 1);
        bits.push(bit);
        bits.extend_from_slice(&self.bits);
        Self { bits }
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    /// Bitwise complement.
    pub fn complement(&self) -> BitString {
        Self {
            bits: self.bits.iter().map(|b| !b).collect(),
        }
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> BitString {
        Self {
            bits: self.bits[range].to_vec(),
        }
    }

    /// All `2^len` strings of length `len` in increasing order.
    pub fn all_of_length(len: usize) -> impl Iterator<Item = BitString> {
        assert!(len < 64, "fixed length code too long to enumerate");
        (0..1u64 << len).map(move |v| BitString::from_u64(v, len))
    }

    /// Render with '0'/'1' characters; ε renders as "-".
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    /// Pack MSB-first into bytes. Unused bits of the last byte are zero.
    pub fn to_bytes_msb(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.len().div_ceil(8)];
        for (i, &bit) in self.bits.iter().enumerate() {
            if bit {
                out[i / 8] |= 0x80 >> (i % 8);
            }
        }
        out
    }

    /// Inverse of [`BitString::to_bytes_msb`]; reads the first `bit_len` bits.
    pub fn from_bytes_msb(bytes: &[u8], bit_len: usize) -> Option<BitString> {
        if bit_len > bytes.len().saturating_mul(8) {
            return None;
        }
        let bits = (0..bit_len)
            .map(|i| bytes[i / 8] & (0x80 >> (i % 8)) != 0)
            .collect();
        Some(Self { bits })
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bits.is_empty() {
            return f.write_str("-");
        }
        let s: String = self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = ParseBitStringError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "-" || s == "ε" {
            return Ok(Self::empty());
        }
        if s.is_empty() {
            return Err(ParseBitStringError { text: s.into() });
        }
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(ParseBitStringError { text: s.into() }),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Self::from_bits)
    }
}

impl From<BitString> for String {
    fn from(b: BitString) -> String {
        b.to_string()
    }
}

impl TryFrom<String> for BitString {
    type Error = ParseBitStringError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl FromIterator<bool> for BitString {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Self::from_bits(iter.into_iter().collect())
    }
}

/// Shorthand used throughout tests and docs: `bs("0110")`, `bs("-")`.
///
/// Panics on malformed input.
pub fn bs(text: &str) -> BitString {
    text.parse().expect("malformed bit string literal")
}

/// True iff `w` begins with `p`. Equality counts; ε prefixes everything.
pub fn is_prefix(p: &BitString, w: &BitString) -> bool {
    w.bits.starts_with(&p.bits)
}

/// Lexicographic comparison with `0 < 1`; a proper prefix is less than its extension.
pub fn lex_compare(u: &BitString, v: &BitString) -> Ordering {
    u.bits.cmp(&v.bits)
}

/// A finite set of distinct bit strings, kept in lexicographic order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BitSet {
    members: BTreeSet<BitString>,
}

impl BitSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns false if `member` was already present.
    pub fn insert(&mut self, member: BitString) -> bool {
        self.members.insert(member)
    }

    pub fn contains(&self, member: &BitString) -> bool {
        self.members.contains(member)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &BitString> + Clone {
        self.members.iter()
    }

    pub fn max_len(&self) -> usize {
        self.members.iter().map(BitString::len).max().unwrap_or(0)
    }
}

impl FromIterator<BitString> for BitSet {
    fn from_iter<I: IntoIterator<Item = BitString>>(iter: I) -> Self {
        Self {
            members: iter.into_iter().collect(),
        }
    }
}

impl<'a> IntoIterator for &'a BitSet {
    type Item = &'a BitString;
    type IntoIter = std::collections::btree_set::Iter<'a, BitString>;

    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}

/// Pairs `(u, w)` of the sorted sequence where `u` is a prefix of `w`.
///
/// In lexicographic order every string lying between `u` and one of its
/// extensions also extends `u`, so checking neighbours finds a violation
/// whenever one exists. Equal neighbours are reported too.
pub(crate) fn adjacent_prefix_violations<'s, 'b, T>(
    sorted: &'s [(&'b BitString, T)],
) -> impl Iterator<Item = (&'s (&'b BitString, T), &'s (&'b BitString, T))> + 's {
    sorted
        .windows(2)
        .filter(|w| is_prefix(w[0].0, w[1].0))
        .map(|w| (&w[0], &w[1]))
}

/// True iff no member is a prefix of a distinct member.
pub fn is_prefix_free(s: &BitSet) -> bool {
    let sorted: Vec<(&BitString, ())> = s.iter().map(|b| (b, ())).collect();
    let clean = adjacent_prefix_violations(&sorted).next().is_none();
    clean
}

/// Exact Kraft sum `Σ 2^(-len)` over the members.
pub fn kraft_sum(s: &BitSet) -> BigRational {
    kraft_sum_of(s.iter())
}

pub(crate) fn kraft_sum_of<'a>(members: impl Iterator<Item = &'a BitString> + Clone) -> BigRational {
    let max_len = members.clone().map(BitString::len).max().unwrap_or(0);
    let numerator = members.fold(BigInt::from(0u8), |acc, b| {
        acc + (BigInt::from(1u8) << (max_len - b.len()))
    });
    BigRational::new(numerator, BigInt::from(1u8) << max_len)
}
