use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::ir::hash::{digest, tags};

/// A 32-byte experiment seed. Every random choice in the crate flows from one of these.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Seed(pub [u8; 32]);

impl Seed {
    pub fn from_u64(v: u64) -> Self {
        let mut b = [0u8; 32];
        b[24..].copy_from_slice(&v.to_be_bytes());
        Seed(b)
    }

    /// Parses 1 to 64 hex digits as a big-endian number, left-padded to 32 bytes.
    pub fn from_hex(s: &str) -> Result<Self> {
        let s = s.trim();
        let s = s.strip_prefix("0x").unwrap_or(s);
        if s.is_empty() || s.len() > 64 || !s.chars().all(|c| c.is_ascii_hexdigit()) {
            return Err(Error::Precondition(format!(
                "seed must be 1 to 64 hex digits, got {s:?}"
            )));
        }
        let padded = format!("{s:0>64}");
        let mut b = [0u8; 32];
        hex::decode_to_slice(&padded, &mut b).expect("validated hex");
        Ok(Seed(b))
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    /// Independent sub-seed for a named purpose.
    pub fn derive(&self, label: &str) -> Seed {
        let mut buf = Vec::with_capacity(33 + label.len());
        buf.extend_from_slice(&self.0);
        buf.push(b'L');
        buf.extend_from_slice(label.as_bytes());
        Seed(digest(tags::SEED, &buf))
    }

    /// Seed of trial `index` of an experiment: `H(seed || index)`.
    pub fn trial(&self, index: u64) -> Seed {
        let mut buf = Vec::with_capacity(41);
        buf.extend_from_slice(&self.0);
        buf.push(b'T');
        buf.extend_from_slice(&index.to_be_bytes());
        Seed(digest(tags::SEED, &buf))
    }

    pub fn rng(&self) -> ChaCha20Rng {
        ChaCha20Rng::from_seed(self.0)
    }
}

impl fmt::Debug for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Seed({})", self.to_hex())
    }
}

impl fmt::Display for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hex_is_left_padded() {
        assert_eq!(Seed::from_hex("2a").unwrap(), Seed::from_u64(42));
        let s = Seed::from_hex("0xff").unwrap();
        assert_eq!(Seed::from_hex(&s.to_hex()).unwrap(), s);
        assert!(Seed::from_hex("").is_err());
        assert!(Seed::from_hex("xyz").is_err());
        assert!(Seed::from_hex(&"1".repeat(65)).is_err());
    }

    #[test]
    fn derivations_are_distinct_and_stable() {
        let s = Seed::from_u64(1);
        assert_eq!(s.derive("a"), s.derive("a"));
        assert_ne!(s.derive("a"), s.derive("b"));
        assert_ne!(s.trial(0), s.trial(1));
        assert_ne!(s.trial(0), s);
    }
}
