use core::fmt;

use serde::{Deserialize, Serialize};
use sha3::{Digest, Keccak256};

/// 32-byte Keccak-256 digest.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct Hash256(pub [u8; 32]);

impl Hash256 {
    pub const ZERO: Hash256 = Hash256([0; 32]);

    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }

    pub fn from_slice(bytes: &[u8]) -> Option<Self> {
        let arr: [u8; 32] = bytes.try_into().ok()?;
        Some(Hash256(arr))
    }

    /// Hash of `self ∥ other`, the internal node rule of the Merkle tree.
    pub fn combine(&self, other: &Hash256) -> Hash256 {
        let mut hasher = Keccak256::new();
        hasher.update(self.0);
        hasher.update(other.0);
        Hash256(hasher.finalize().into())
    }
}

pub fn keccak256(data: &[u8]) -> Hash256 {
    Hash256(Keccak256::digest(data).into())
}

impl AsRef<[u8]> for Hash256 {
    fn as_ref(&self) -> &[u8] {
        &self.0
    }
}

impl fmt::Display for Hash256 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("0x")?;
        for b in self.0 {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Hash256 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use alloc::vec::Vec;
    use proptest::prelude::*;

    #[test]
    fn empty_digest_vector() {
        assert_eq!(
            format!("{}", keccak256(b"")),
            "0xc5d2460186f7233c927e7db2dcc703c0e500b653ca82273b7bfad8045d85a470"
        );
    }

    #[test]
    fn deterministic() {
        assert_eq!(keccak256(b"abc"), keccak256(b"abc"));
        assert_eq!(
            format!("{}", keccak256(b"abc")),
            "0x4e03657aea45a94fc7d47ba826c8d667c0d1e6e33a64a036ec44f58fa12d6c45"
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn zero_suffix_changes_digest(x in proptest::collection::vec(any::<u8>(), 0..64)) {
            let mut y: Vec<u8> = x.clone();
            y.push(0);
            prop_assert_ne!(keccak256(&x), keccak256(&y));
        }
    }
}
