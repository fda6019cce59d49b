use core::fmt;

use k256::ecdsa::{RecoveryId, Signature, SigningKey, VerifyingKey};
use serde::{Deserialize, Serialize};

use super::{keccak256, CryptoError, Hash256};
use crate::ledger::Address;

/// Encoded size of a recoverable signature: `v ∥ r ∥ s`.
pub const SIGNATURE_SIZE: usize = 65;

/// Offset added to the recovery id in the `v` byte.
const V_OFFSET: u8 = 27;

/// secp256k1 signing key of one agent.
#[derive(Clone)]
pub struct SecretKey {
    inner: SigningKey,
}

impl SecretKey {
    pub fn from_bytes(bytes: &[u8; 32]) -> Result<Self, CryptoError> {
        SigningKey::from_slice(bytes)
            .map(|inner| SecretKey { inner })
            .map_err(|_| CryptoError::InvalidSecretKey)
    }

    /// Deterministically derives a valid key from arbitrary seed material by
    /// rehashing until the digest is a valid scalar.
    pub fn derive(material: &[u8]) -> Self {
        let mut digest = keccak256(material);
        loop {
            if let Ok(key) = Self::from_bytes(&digest.0) {
                return key;
            }
            digest = keccak256(&digest.0);
        }
    }

    pub fn to_bytes(&self) -> [u8; 32] {
        self.inner.to_bytes().into()
    }

    /// Uncompressed public key without the SEC1 tag byte.
    pub fn public_key(&self) -> [u8; 64] {
        uncompressed(self.inner.verifying_key())
    }

    pub fn address(&self) -> Address {
        Address::from_public_key(&self.public_key())
    }
}

impl fmt::Debug for SecretKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SecretKey").field("address", &self.address()).finish()
    }
}

fn uncompressed(key: &VerifyingKey) -> [u8; 64] {
    let point = key.to_encoded_point(false);
    let mut out = [0u8; 64];
    out.copy_from_slice(&point.as_bytes()[1..]);
    out
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RecoverableSignature {
    pub v: u8,
    pub r: [u8; 32],
    pub s: [u8; 32],
}

impl RecoverableSignature {
    pub fn to_bytes(&self) -> [u8; SIGNATURE_SIZE] {
        let mut out = [0u8; SIGNATURE_SIZE];
        out[0] = self.v;
        out[1..33].copy_from_slice(&self.r);
        out[33..].copy_from_slice(&self.s);
        out
    }

    pub fn from_bytes(bytes: &[u8; SIGNATURE_SIZE]) -> Self {
        let mut r = [0u8; 32];
        let mut s = [0u8; 32];
        r.copy_from_slice(&bytes[1..33]);
        s.copy_from_slice(&bytes[33..]);
        RecoverableSignature { v: bytes[0], r, s }
    }

    pub fn from_slice(bytes: &[u8]) -> Result<Self, CryptoError> {
        let arr: &[u8; SIGNATURE_SIZE] =
            bytes.try_into().map_err(|_| CryptoError::MalformedSignature)?;
        Ok(Self::from_bytes(arr))
    }
}

impl fmt::Debug for RecoverableSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sig(v={}, r=", self.v)?;
        for b in &self.r[..4] {
            write!(f, "{b:02x}")?;
        }
        f.write_str("..)")
    }
}

/// Signs the raw 32-byte digest; no message prefix is applied.
pub fn sign(key: &SecretKey, digest: &Hash256) -> RecoverableSignature {
    let (sig, recid) = key
        .inner
        .sign_prehash_recoverable(&digest.0)
        .expect("32-byte prehash is always signable");
    let (r, s) = sig.split_bytes();
    RecoverableSignature {
        v: V_OFFSET + recid.to_byte(),
        r: r.into(),
        s: s.into(),
    }
}

pub fn recover(digest: &Hash256, vrs: &RecoverableSignature) -> Result<Address, CryptoError> {
    let recid = vrs
        .v
        .checked_sub(V_OFFSET)
        .filter(|id| *id <= 1)
        .and_then(RecoveryId::from_byte)
        .ok_or(CryptoError::MalformedSignature)?;
    let sig = Signature::from_scalars(vrs.r, vrs.s).map_err(|_| CryptoError::MalformedSignature)?;
    let key = VerifyingKey::recover_from_prehash(&digest.0, &sig, recid)
        .map_err(|_| CryptoError::MalformedSignature)?;
    Ok(Address::from_public_key(&uncompressed(&key)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn key(i: u64) -> SecretKey {
        SecretKey::derive(&i.to_be_bytes())
    }

    #[test]
    fn round_trip_random_keys() {
        for i in 0..100u64 {
            let sk = key(i);
            let digest = keccak256(&(i * 7919).to_le_bytes());
            let vrs = sign(&sk, &digest);
            assert_eq!(recover(&digest, &vrs), Ok(sk.address()));
        }
    }

    #[test]
    fn all_zero_signature_is_malformed() {
        let vrs = RecoverableSignature::from_bytes(&[0u8; SIGNATURE_SIZE]);
        assert_eq!(recover(&Hash256::ZERO, &vrs), Err(CryptoError::MalformedSignature));
        let zero_rs = RecoverableSignature { v: 27, r: [0; 32], s: [0; 32] };
        assert_eq!(recover(&Hash256::ZERO, &zero_rs), Err(CryptoError::MalformedSignature));
    }

    #[test]
    fn encoding_is_v_r_s() {
        let vrs = sign(&key(1), &keccak256(b"x"));
        let bytes = vrs.to_bytes();
        assert_eq!(bytes[0], vrs.v);
        assert_eq!(&bytes[1..33], &vrs.r);
        assert_eq!(&bytes[33..], &vrs.s);
        assert_eq!(RecoverableSignature::from_bytes(&bytes), vrs);
        assert!(RecoverableSignature::from_slice(&bytes[..64]).is_err());
    }

    #[test]
    fn known_address_derivation() {
        // secret key 1 maps to the generator point, whose Ethereum address is well known.
        let mut one = [0u8; 32];
        one[31] = 1;
        let sk = SecretKey::from_bytes(&one).unwrap();
        assert_eq!(
            alloc::format!("{}", sk.address()),
            "0x7e5f4552091a69125d5dfcb7b8c2659029395bdf"
        );
        assert!(SecretKey::from_bytes(&[0u8; 32]).is_err());
    }

    proptest! {
        #[test]
        fn flipped_r_bit_never_recovers_signer(seed in any::<u64>(), msg in any::<[u8; 16]>(), bit in 0usize..256) {
            let sk = key(seed);
            let digest = keccak256(&msg);
            let mut vrs = sign(&sk, &digest);
            vrs.r[bit / 8] ^= 1 << (bit % 8);
            match recover(&digest, &vrs) {
                Ok(addr) => prop_assert_ne!(addr, sk.address()),
                Err(e) => prop_assert_eq!(e, CryptoError::MalformedSignature),
            }
        }
    }
}
