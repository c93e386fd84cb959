//! The one hash used everywhere: SHA-256 over a domain-separation tag byte followed by
//! the operand bytes, truncated to a requested bit width.

use sha2::{Digest, Sha256};

use super::bits::BitStr;

/// Widest output a HASH instruction may request.
pub const MAX_HASH_WIDTH: usize = 256;

/// Domain-separation tags used by the built-in constructions.
pub mod tags {
    /// Equality check on a salted input (point, pattern, half checks, compute-and-compare trigger).
    pub const CHECK: u8 = 0x01;
    /// Payload mask for compute-and-compare.
    pub const MASK: u8 = 0x02;
    /// Seed derivation. Never used inside programs.
    pub const SEED: u8 = 0x10;
    /// Challenge bundle identifiers.
    pub const BUNDLE: u8 = 0x11;
}

pub fn digest(tag: u8, data: &[u8]) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update([tag]);
    h.update(data);
    h.finalize().into()
}

/// `SHA-256(tag || bytes(input))`, keeping the leading `width` bits.
pub fn hash_bits(tag: u8, input: &BitStr, width: usize) -> BitStr {
    assert!((1..=MAX_HASH_WIDTH).contains(&width), "hash width {width}");
    let d = digest(tag, input.as_bytes());
    BitStr::from_bits((0..width).map(|i| d[i / 8] & (0x80 >> (i % 8)) != 0))
        .expect("width checked above")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        // sha256(0x01 || "abc")
        let d = digest(0x01, b"abc");
        assert_eq!(
            hex::encode(d),
            hex::encode(Sha256::digest([&[0x01u8][..], b"abc"].concat()))
        );
    }

    #[test]
    fn truncation_takes_leading_bits() {
        let x = BitStr::from_u64(0x1234, 16).unwrap();
        let full = digest(tags::CHECK, x.as_bytes());
        let h12 = hash_bits(tags::CHECK, &x, 12);
        let expect = (u64::from(full[0]) << 4) | u64::from(full[1] >> 4);
        assert_eq!(h12.to_u64(), Some(expect));
        let h256 = hash_bits(tags::CHECK, &x, 256);
        assert_eq!(h256.as_bytes(), &full);
    }

    #[test]
    fn tags_separate_domains() {
        let x = BitStr::from_u64(7, 8).unwrap();
        assert_ne!(
            hash_bits(tags::CHECK, &x, 64),
            hash_bits(tags::MASK, &x, 64)
        );
    }
}
