//! Bit strings as first-class values.
//!
//! Messages, master keys, and certificates are all plain 0/1 strings; this
//! module gives them one representation with XOR, display, and parsing.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rng::RandomSource;

/// An ordered sequence of bits, stored one byte per bit (each 0 or 1).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BitString(Vec<u8>);

impl BitString {
    pub fn new() -> Self {
        BitString(Vec::new())
    }

    /// Builds from raw 0/1 bytes. Any other byte value is rejected.
    pub fn from_bits(bits: impl IntoIterator<Item = u8>) -> Result<Self> {
        let v: Vec<u8> = bits.into_iter().collect();
        if v.iter().any(|&b| b > 1) {
            return Err(Error::invalid("bit string entries must be 0 or 1"));
        }
        Ok(BitString(v))
    }

    /// `n` uniform bits drawn from `rng`.
    pub fn random(n: usize, rng: &mut RandomSource) -> Self {
        BitString((0..n).map(|_| rng.next_bit()).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bit(&self, i: usize) -> u8 {
        self.0[i]
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn push(&mut self, bit: u8) {
        debug_assert!(bit <= 1);
        self.0.push(bit);
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        self.0.iter().copied()
    }

    /// Bitwise XOR. Lengths must match.
    pub fn xor(&self, other: &BitString) -> Result<BitString> {
        if self.len() != other.len() {
            return Err(Error::invalid(format!(
                "xor length mismatch: {} vs {}",
                self.len(),
                other.len()
            )));
        }
        Ok(BitString(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a ^ b)
                .collect(),
        ))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&b| b == 0)
    }

    /// Number of positions where the two strings differ. Lengths must match.
    pub fn hamming(&self, other: &BitString) -> Result<usize> {
        Ok(self.xor(other)?.0.iter().map(|&b| b as usize).sum())
    }

    /// Big-endian integer value reduced mod `m`. `m` must be positive.
    pub fn value_mod(&self, m: u64) -> u64 {
        assert!(m > 0);
        self.0
            .iter()
            .fold(0u64, |acc, &b| (acc.wrapping_mul(2) + b as u64) % m)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::invalid(format!(
                    "bit string may contain only 0 and 1, got {other:?}"
                ))),
            })
            .collect::<Result<Vec<u8>>>()
            .map(BitString)
    }
}

// Serialized as the plain 0/1 string so result records stay human-readable.
impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
