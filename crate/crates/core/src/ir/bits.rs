//! Fixed-width bit strings.
//!
//! Bits are indexed from the most significant end: bit 0 is the first bit of the
//! string and the first symbol a DFA consumes. The backing bytes hold the value as a
//! big-endian unsigned integer, right-aligned, so unused high bits of the first byte
//! are always zero. That makes byte-wise comparison of equal-width strings agree with
//! unsigned integer comparison.

use std::cmp::Ordering;
use std::fmt;

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BitsError {
    #[error("bit string width must be at least 1")]
    ZeroWidth,
    #[error("expected {expected} bytes for width {width}, got {got}")]
    ByteLength {
        width: usize,
        expected: usize,
        got: usize,
    },
    #[error("nonzero padding bits for width {width}")]
    Padding { width: usize },
    #[error("value does not fit in {width} bits")]
    Overflow { width: usize },
    #[error("invalid bit string literal: {0}")]
    Literal(String),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitStr {
    width: usize,
    bytes: Vec<u8>,
}

pub(crate) fn byte_len(width: usize) -> usize {
    width.div_ceil(8)
}

impl BitStr {
    pub fn zeros(width: usize) -> Result<Self, BitsError> {
        if width == 0 {
            return Err(BitsError::ZeroWidth);
        }
        Ok(Self {
            width,
            bytes: vec![0; byte_len(width)],
        })
    }

    /// Builds a bit string from right-aligned big-endian bytes, rejecting stray padding.
    pub fn from_bytes(width: usize, bytes: &[u8]) -> Result<Self, BitsError> {
        if width == 0 {
            return Err(BitsError::ZeroWidth);
        }
        let expected = byte_len(width);
        if bytes.len() != expected {
            return Err(BitsError::ByteLength {
                width,
                expected,
                got: bytes.len(),
            });
        }
        let pad = expected * 8 - width;
        if pad > 0 && bytes[0] >> (8 - pad) != 0 {
            return Err(BitsError::Padding { width });
        }
        Ok(Self {
            width,
            bytes: bytes.to_vec(),
        })
    }

    pub fn from_u64(value: u64, width: usize) -> Result<Self, BitsError> {
        if width == 0 {
            return Err(BitsError::ZeroWidth);
        }
        if width < 64 && value >> width != 0 {
            return Err(BitsError::Overflow { width });
        }
        let mut out = Self::zeros(width)?;
        let n = out.bytes.len();
        for (i, b) in value.to_be_bytes().iter().rev().enumerate().take(n) {
            out.bytes[n - 1 - i] = *b;
        }
        Ok(out)
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Result<Self, BitsError> {
        let bits: Vec<bool> = bits.into_iter().collect();
        let mut out = Self::zeros(bits.len())?;
        for (i, b) in bits.into_iter().enumerate() {
            out.set_bit(i, b);
        }
        Ok(out)
    }

    /// Parses a string of `0`/`1` characters, most significant bit first.
    pub fn parse_binary(s: &str) -> Result<Self, BitsError> {
        let bits = s
            .chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(BitsError::Literal(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_bits(bits)
    }

    pub fn random<R: Rng + ?Sized>(width: usize, rng: &mut R) -> Result<Self, BitsError> {
        let mut out = Self::zeros(width)?;
        rng.fill_bytes(&mut out.bytes);
        out.clear_padding();
        Ok(out)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }

    fn locate(&self, i: usize) -> (usize, u8) {
        assert!(
            i < self.width,
            "bit {i} out of range for width {}",
            self.width
        );
        let from_lsb = self.width - 1 - i;
        (self.bytes.len() - 1 - from_lsb / 8, 1u8 << (from_lsb % 8))
    }

    pub fn bit(&self, i: usize) -> bool {
        let (byte, mask) = self.locate(i);
        self.bytes[byte] & mask != 0
    }

    pub fn set_bit(&mut self, i: usize, value: bool) {
        let (byte, mask) = self.locate(i);
        if value {
            self.bytes[byte] |= mask;
        } else {
            self.bytes[byte] &= !mask;
        }
    }

    pub fn flip_bit(&mut self, i: usize) {
        let (byte, mask) = self.locate(i);
        self.bytes[byte] ^= mask;
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.width).map(move |i| self.bit(i))
    }

    pub fn count_ones(&self) -> usize {
        self.bytes.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.bytes.iter().all(|&b| b == 0)
    }

    /// Value as an unsigned integer; `None` when wider than 64 bits and the value overflows.
    pub fn to_u64(&self) -> Option<u64> {
        let mut v: u64 = 0;
        for &b in &self.bytes {
            if v >> 56 != 0 {
                return None;
            }
            v = (v << 8) | u64::from(b);
        }
        Some(v)
    }

    fn clear_padding(&mut self) {
        let pad = self.bytes.len() * 8 - self.width;
        if pad > 0 {
            self.bytes[0] &= 0xff >> pad;
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(u8, u8) -> u8) -> Self {
        debug_assert_eq!(self.width, other.width);
        Self {
            width: self.width,
            bytes: self
                .bytes
                .iter()
                .zip(&other.bytes)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn xor(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a ^ b)
    }

    pub fn and(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn or(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn not(&self) -> Self {
        let mut out = Self {
            width: self.width,
            bytes: self.bytes.iter().map(|b| !b).collect(),
        };
        out.clear_padding();
        out
    }

    /// `self` followed by `other`.
    pub fn concat(&self, other: &Self) -> Self {
        let mut out = Self {
            width: self.width + other.width,
            bytes: vec![0; byte_len(self.width + other.width)],
        };
        for (i, b) in self.bits().chain(other.bits()).enumerate() {
            if b {
                out.set_bit(i, true);
            }
        }
        out
    }

    /// Keeps the bits at positions where `mask` is set, in order.
    pub fn project(&self, mask: &Self) -> Result<Self, BitsError> {
        debug_assert_eq!(self.width, mask.width);
        Self::from_bits(
            self.bits()
                .zip(mask.bits())
                .filter_map(|(b, keep)| keep.then_some(b)),
        )
    }

    /// The first `width` bits.
    pub fn prefix(&self, width: usize) -> Result<Self, BitsError> {
        debug_assert!(width <= self.width);
        Self::from_bits(self.bits().take(width))
    }

    /// Verilog-style sized hex literal, e.g. `12'h0a3`.
    pub fn to_literal(&self) -> String {
        format!("{}'h{}", self.width, hex::encode(&self.bytes))
    }

    pub fn parse_literal(s: &str) -> Result<Self, BitsError> {
        let bad = || BitsError::Literal(s.to_string());
        let (w, h) = s.split_once("'h").ok_or_else(bad)?;
        let width: usize = w.parse().map_err(|_| bad())?;
        let bytes = hex::decode(h).map_err(|_| bad())?;
        Self::from_bytes(width, &bytes)
    }
}

impl PartialOrd for BitStr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Orders by width, then as unsigned big-endian integers.
impl Ord for BitStr {
    fn cmp(&self, other: &Self) -> Ordering {
        self.width
            .cmp(&other.width)
            .then_with(|| self.bytes.cmp(&other.bytes))
    }
}

impl fmt::Debug for BitStr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.width <= 32 {
            let s: String = self.bits().map(|b| if b { '1' } else { '0' }).collect();
            write!(f, "BitStr({s})")
        } else {
            write!(f, "BitStr({})", self.to_literal())
        }
    }
}

impl fmt::Display for BitStr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_literal())
    }
}
