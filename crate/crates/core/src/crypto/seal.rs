//! Proposal sealing. This is a protocol-flow model, not real encryption: the
//! ciphertext is the plaintext XORed with a keystream of `keccak(sk ∥ counter)`
//! blocks, tagged with `keccak(pk)` so a wrong key is detected on open.

use alloc::vec::Vec;

use super::{keccak256, CryptoError, Hash256};

/// One-time key pair a designer seals a proposal with and later reveals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SealingKeyPair {
    pub secret: [u8; 32],
    pub public: [u8; 32],
}

impl SealingKeyPair {
    pub fn from_secret(secret: [u8; 32]) -> Self {
        SealingKeyPair { secret, public: public_of(&secret) }
    }
}

fn public_of(secret: &[u8; 32]) -> [u8; 32] {
    let mut buf = Vec::with_capacity(40);
    buf.extend_from_slice(b"seal-pk:");
    buf.extend_from_slice(secret);
    keccak256(&buf).0
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SealedBlob {
    pub ciphertext: Vec<u8>,
    pub key_tag: Hash256,
}

impl SealedBlob {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(32 + self.ciphertext.len());
        out.extend_from_slice(&self.key_tag.0);
        out.extend_from_slice(&self.ciphertext);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CryptoError> {
        if bytes.len() < 32 {
            return Err(CryptoError::MalformedBlob);
        }
        let (tag, ct) = bytes.split_at(32);
        Ok(SealedBlob { ciphertext: ct.to_vec(), key_tag: Hash256::from_slice(tag).unwrap() })
    }
}

fn apply_keystream(secret: &[u8; 32], data: &[u8]) -> Vec<u8> {
    let mut block_input = [0u8; 40];
    block_input[..32].copy_from_slice(secret);
    data.chunks(32)
        .enumerate()
        .flat_map(|(counter, chunk)| {
            block_input[32..].copy_from_slice(&(counter as u64).to_be_bytes());
            let pad = keccak256(&block_input);
            chunk.iter().zip(pad.0).map(|(b, k)| b ^ k).collect::<Vec<_>>()
        })
        .collect()
}

pub fn seal(keys: &SealingKeyPair, message: &[u8]) -> SealedBlob {
    SealedBlob { ciphertext: apply_keystream(&keys.secret, message), key_tag: keccak256(&keys.public) }
}

pub fn open_seal(secret: &[u8; 32], blob: &SealedBlob) -> Result<Vec<u8>, CryptoError> {
    if keccak256(&public_of(secret)) != blob.key_tag {
        return Err(CryptoError::KeyMismatch);
    }
    Ok(apply_keystream(secret, &blob.ciphertext))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_mismatch() {
        let keys = SealingKeyPair::from_secret([7; 32]);
        let other = SealingKeyPair::from_secret([8; 32]);
        let msg = b"a logo with a fox and seventy-odd bytes of description text to span blocks";
        let blob = seal(&keys, msg);
        assert_ne!(&blob.ciphertext[..], &msg[..]);
        assert_eq!(open_seal(&keys.secret, &blob).unwrap(), msg);
        assert_eq!(open_seal(&other.secret, &blob), Err(CryptoError::KeyMismatch));
        let restored = SealedBlob::from_bytes(&blob.to_bytes()).unwrap();
        assert_eq!(restored, blob);
        assert_eq!(SealedBlob::from_bytes(&[0; 5]), Err(CryptoError::MalformedBlob));
    }

    #[test]
    fn empty_message() {
        let keys = SealingKeyPair::from_secret([1; 32]);
        let blob = seal(&keys, b"");
        assert!(blob.ciphertext.is_empty());
        assert_eq!(open_seal(&keys.secret, &blob).unwrap(), b"");
    }
}
