//! Fixed-length bit strings with MSB-first text form.
//!
//! Storage is little-endian 64-bit limbs: bit `i` is the coefficient of `x^i`
//! when the string is read as a GF(2) polynomial, so the first character of the
//! MSB-first text form is bit `len - 1`. Bits at positions `>= len` are always
//! zero.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::FieldError;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    len: usize,
    limbs: Vec<u64>,
}

pub(crate) fn limbs_for(bits: usize) -> usize {
    bits.div_ceil(64)
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        Self { len, limbs: vec![0; limbs_for(len)] }
    }

    pub fn empty() -> Self {
        Self::zeros(0)
    }

    /// `value` read as an unsigned integer whose lowest bit is the last
    /// character of the MSB-first form.
    pub fn from_u64(value: u64, len: usize) -> Result<Self, FieldError> {
        if len < 64 && value >> len != 0 {
            return Err(FieldError::ValueTooWide { value, len });
        }
        let mut out = Self::zeros(len);
        if len > 0 {
            out.limbs[0] = value;
        }
        Ok(out)
    }

    /// Builds from raw little-endian limbs, masking anything above `len`.
    pub fn from_limbs(mut limbs: Vec<u64>, len: usize) -> Self {
        limbs.resize(limbs_for(len), 0);
        let mut out = Self { len, limbs };
        out.mask_top();
        out
    }

    pub fn from_msb_bits(bits: &[bool]) -> Self {
        let len = bits.len();
        let mut out = Self::zeros(len);
        for (pos, &b) in bits.iter().enumerate() {
            if b {
                out.set_bit(len - 1 - pos, true);
            }
        }
        out
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let limbs = (0..limbs_for(len)).map(|_| rng.random::<u64>()).collect();
        Self::from_limbs(limbs, len)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn limbs(&self) -> &[u64] {
        &self.limbs
    }

    pub fn into_limbs(self) -> Vec<u64> {
        self.limbs
    }

    /// Coefficient of `x^i`.
    pub fn bit(&self, i: usize) -> bool {
        i < self.len && (self.limbs[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set_bit(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.limbs[i / 64] |= mask;
        } else {
            self.limbs[i / 64] &= !mask;
        }
    }

    /// Bits in MSB-first order.
    pub fn to_msb_bits(&self) -> Vec<bool> {
        (0..self.len).rev().map(|i| self.bit(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> u32 {
        self.limbs.iter().map(|w| w.count_ones()).sum()
    }

    /// Integer value, if it fits in 64 bits.
    pub fn to_u64(&self) -> Option<u64> {
        if self.limbs.iter().skip(1).any(|&w| w != 0) {
            return None;
        }
        Some(self.limbs.first().copied().unwrap_or(0))
    }

    pub fn xor(&self, other: &Self) -> Result<Self, FieldError> {
        if self.len != other.len {
            return Err(FieldError::LengthMismatch { expected: self.len, actual: other.len });
        }
        let limbs = self.limbs.iter().zip(&other.limbs).map(|(a, b)| a ^ b).collect();
        Ok(Self { len: self.len, limbs })
    }

    /// First `k` bits of the MSB-first form.
    pub fn truncate_msb(&self, k: usize) -> Result<Self, FieldError> {
        if k > self.len {
            return Err(FieldError::TruncateTooLong { k, len: self.len });
        }
        Ok(self.shr(self.len - k, k))
    }

    /// `self` followed by `low` in MSB-first order.
    pub fn concat(&self, low: &Self) -> Self {
        let len = self.len + low.len;
        let mut limbs = low.limbs.clone();
        limbs.resize(limbs_for(len), 0);
        xor_shifted_into(&mut limbs, &self.limbs, low.len);
        Self { len, limbs }
    }

    /// Bits `[shift, shift + len)` as a new string of length `len`.
    fn shr(&self, shift: usize, len: usize) -> Self {
        let word = shift / 64;
        let bit = shift % 64;
        let mut limbs = vec![0u64; limbs_for(len)];
        for (i, out) in limbs.iter_mut().enumerate() {
            let lo = self.limbs.get(word + i).copied().unwrap_or(0);
            let hi = self.limbs.get(word + i + 1).copied().unwrap_or(0);
            *out = if bit == 0 { lo } else { (lo >> bit) | (hi << (64 - bit)) };
        }
        Self::from_limbs(limbs, len)
    }

    fn mask_top(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.limbs.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    /// Enumerates every string of length `len` in increasing integer order.
    pub fn all(len: usize) -> impl Iterator<Item = BitString> {
        assert!(len < 32, "exhaustive enumeration limited to short strings");
        (0..1u64 << len).map(move |v| BitString::from_u64(v, len).expect("fits"))
    }
}

/// `dst ^= src << shift`, silently dropping bits past the end of `dst`.
pub(crate) fn xor_shifted_into(dst: &mut [u64], src: &[u64], shift: usize) {
    let word = shift / 64;
    let bit = shift % 64;
    for (i, &w) in src.iter().enumerate() {
        if w == 0 {
            continue;
        }
        let j = i + word;
        if j < dst.len() {
            dst[j] ^= w << bit;
        }
        if bit != 0 && j + 1 < dst.len() {
            dst[j + 1] ^= w >> (64 - bit);
        }
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.to_msb_bits().into_iter().map(|b| if b { '1' } else { '0' }).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0b{self}")
    }
}

impl FromStr for BitString {
    type Err = FieldError;

    /// Accepts an MSB-first string of `0`/`1`, optionally prefixed by `0b`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let body = s.strip_prefix("0b").unwrap_or(s);
        let bits = body
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(FieldError::Parse(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_msb_bits(&bits))
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
