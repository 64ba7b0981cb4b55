//! Fixed-length bit strings and prefixes in lexicographic order.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Longest supported string.
pub const MAX_LEN: usize = 4096;

/// A string in `{0,1}^n`, ordered lexicographically (which for equal lengths
/// coincides with the order of [`BitString::rank`]).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() || bits.len() > MAX_LEN {
            return Err(Error::Length(format!(
                "bit string length {} not in [1, {MAX_LEN}]",
                bits.len()
            )));
        }
        Ok(Self { bits })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![false; n])
    }

    pub fn ones(n: usize) -> Result<Self> {
        Self::new(vec![true; n])
    }

    /// Inverse of [`rank`](Self::rank): the `n`-bit string whose big-endian
    /// binary value is `rank`.
    pub fn from_rank(rank: u64, n: usize) -> Result<Self> {
        if n == 0 || n > 64 {
            return Err(Error::Length(format!("rank conversion needs 1 <= n <= 64, got {n}")));
        }
        if n < 64 && rank >> n != 0 {
            return Err(Error::Length(format!("rank {rank} out of range for n = {n}")));
        }
        Ok(Self {
            bits: (0..n).map(|i| (rank >> (n - 1 - i)) & 1 == 1).collect(),
        })
    }

    /// Lexicographic rank in `[0, 2^n)`.
    ///
    /// # Panics
    /// If `n > 64`.
    pub fn rank(&self) -> u64 {
        assert!(self.bits.len() <= 64, "rank needs n <= 64");
        self.bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bit(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// The first `k` bits as a prefix of this string's length.
    pub fn prefix(&self, k: usize) -> Prefix {
        Prefix {
            bits: self.bits[..k].to_vec(),
            n: self.bits.len(),
        }
    }

    /// Lexicographic predecessor, `None` for `0^n`.
    pub fn predecessor(&self) -> Option<BitString> {
        let last_one = self.bits.iter().rposition(|&b| b)?;
        let mut bits = self.bits.clone();
        bits[last_one] = false;
        for b in &mut bits[last_one + 1..] {
            *b = true;
        }
        Some(BitString { bits })
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|&b| !b)
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse {
                    field: "x",
                    message: format!("unexpected character {other:?} in bit string"),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(bits)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// A prefix `y` of strings in `{0,1}^n`.
///
/// Prefixes of every length `0..=n` are representable so that the cylinder
/// of `y1` is expressible when `|y| = n - 1`; next-bit predictors only accept
/// `|y| < n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Prefix {
    bits: Vec<bool>,
    n: usize,
}

impl Prefix {
    pub fn empty(n: usize) -> Self {
        Self { bits: Vec::new(), n }
    }

    pub fn new(bits: Vec<bool>, n: usize) -> Result<Self> {
        if bits.len() > n {
            return Err(Error::Length(format!(
                "prefix of length {} longer than n = {n}",
                bits.len()
            )));
        }
        Ok(Self { bits, n })
    }

    /// Prefix of length `k` whose big-endian value is `value`.
    pub fn from_value(value: u64, k: usize, n: usize) -> Result<Self> {
        if k > n || k > 64 || (k < 64 && value >> k != 0) {
            return Err(Error::Length(format!("prefix value {value} / length {k} invalid for n = {n}")));
        }
        Ok(Self {
            bits: (0..k).map(|i| (value >> (k - 1 - i)) & 1 == 1).collect(),
            n,
        })
    }

    pub fn parse(s: &str, n: usize) -> Result<Self> {
        if s.is_empty() {
            return Ok(Self::empty(n));
        }
        let x: BitString = s.parse()?;
        Self::new(x.bits, n)
    }

    /// `y` extended by one bit.
    pub fn child(&self, bit: bool) -> Result<Self> {
        if self.bits.len() >= self.n {
            return Err(Error::Length(format!("prefix already has full length {}", self.n)));
        }
        let mut bits = Vec::with_capacity(self.bits.len() + 1);
        bits.extend_from_slice(&self.bits);
        bits.push(bit);
        Ok(Self { bits, n: self.n })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Ambient string length `n`.
    pub fn ambient_len(&self) -> usize {
        self.n
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Big-endian value of the prefix bits.
    pub fn value(&self) -> u64 {
        self.bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
    }

    /// `a_y = y 0^{n-k}`, the smallest string in the cylinder.
    pub fn low(&self) -> BitString {
        let mut bits = self.bits.clone();
        bits.resize(self.n, false);
        BitString { bits }
    }

    /// `b_y = y 1^{n-k}`, the largest string in the cylinder.
    pub fn high(&self) -> BitString {
        let mut bits = self.bits.clone();
        bits.resize(self.n, true);
        BitString { bits }
    }

    pub fn is_prefix_of(&self, x: &BitString) -> bool {
        x.len() == self.n && x.bits().starts_with(&self.bits)
    }
}

impl fmt::Display for Prefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bits.is_empty() {
            return f.write_str("ε");
        }
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}
