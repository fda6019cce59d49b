//! Signed records aggregated off-chain and their fixed-size encodings.
//!
//! Layouts (big-endian, no padding):
//! - entry object: `v(1) ∥ r(32) ∥ s(32) ∥ content digest(32)` = 97 bytes
//! - vote object:  `v(1) ∥ r(32) ∥ s(32) ∥ designer address(20)` = 85 bytes

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::crypto::{
    keccak256, recover, sign, ContentLink, CryptoError, Hash256, RecoverableSignature, SecretKey,
    SIGNATURE_SIZE,
};
use crate::ledger::Address;

pub const EO_SIZE: usize = SIGNATURE_SIZE + 32;
pub const VO_SIZE: usize = SIGNATURE_SIZE + 20;

pub trait Record: Sized {
    const SIZE: usize;

    fn encode_into(&self, out: &mut Vec<u8>);
    /// `bytes.len()` is exactly `SIZE`.
    fn decode(bytes: &[u8]) -> Self;
    fn signature(&self) -> &RecoverableSignature;
    /// Digest the signature covers.
    fn signed_digest(&self) -> Hash256;

    fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(Self::SIZE);
        self.encode_into(&mut out);
        out
    }

    fn signer(&self) -> Result<Address, CryptoError> {
        recover(&self.signed_digest(), self.signature())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryObject {
    pub vrs: RecoverableSignature,
    pub link: ContentLink,
}

impl EntryObject {
    pub fn new(key: &SecretKey, link: ContentLink) -> Self {
        EntryObject { vrs: sign(key, &keccak256(&link.0 .0)), link }
    }
}

impl Record for EntryObject {
    const SIZE: usize = EO_SIZE;

    fn encode_into(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.vrs.to_bytes());
        out.extend_from_slice(&self.link.0 .0);
    }

    fn decode(bytes: &[u8]) -> Self {
        let vrs = RecoverableSignature::from_slice(&bytes[..SIGNATURE_SIZE]).unwrap();
        let digest = Hash256::from_slice(&bytes[SIGNATURE_SIZE..]).unwrap();
        EntryObject { vrs, link: ContentLink(digest) }
    }

    fn signature(&self) -> &RecoverableSignature {
        &self.vrs
    }

    fn signed_digest(&self) -> Hash256 {
        keccak256(&self.link.0 .0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoteObject {
    pub vrs: RecoverableSignature,
    pub designer: Address,
}

impl VoteObject {
    pub fn new(key: &SecretKey, designer: Address) -> Self {
        VoteObject { vrs: sign(key, &keccak256(&designer.0)), designer }
    }
}

impl Record for VoteObject {
    const SIZE: usize = VO_SIZE;

    fn encode_into(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.vrs.to_bytes());
        out.extend_from_slice(&self.designer.0);
    }

    fn decode(bytes: &[u8]) -> Self {
        let vrs = RecoverableSignature::from_slice(&bytes[..SIGNATURE_SIZE]).unwrap();
        let designer = Address::from_slice(&bytes[SIGNATURE_SIZE..]).unwrap();
        VoteObject { vrs, designer }
    }

    fn signature(&self) -> &RecoverableSignature {
        &self.vrs
    }

    fn signed_digest(&self) -> Hash256 {
        keccak256(&self.designer.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ChunkError {
    #[error("chunk length {len} is not a multiple of {record}")]
    Malformed { len: usize, record: usize },
    #[error("record {index} out of range for {count} records")]
    IndexOutOfRange { index: usize, count: usize },
}

/// Concatenation of fixed-size records; one Merkle leaf.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Chunk(pub Vec<u8>);

impl Chunk {
    pub fn from_records<R: Record>(records: &[R]) -> Self {
        let mut out = Vec::with_capacity(records.len() * R::SIZE);
        for r in records {
            r.encode_into(&mut out);
        }
        Chunk(out)
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn digest(&self) -> Hash256 {
        keccak256(&self.0)
    }

    pub fn record_count<R: Record>(&self) -> Result<usize, ChunkError> {
        if !self.0.len().is_multiple_of(R::SIZE) {
            return Err(ChunkError::Malformed { len: self.0.len(), record: R::SIZE });
        }
        Ok(self.0.len() / R::SIZE)
    }

    pub fn split<R: Record>(&self, index: usize) -> Result<R, ChunkError> {
        let count = self.record_count::<R>()?;
        if index >= count {
            return Err(ChunkError::IndexOutOfRange { index, count });
        }
        Ok(R::decode(&self.0[index * R::SIZE..(index + 1) * R::SIZE]))
    }

    pub fn records<'a, R: Record + 'a>(&'a self) -> Result<impl Iterator<Item = R> + 'a, ChunkError> {
        self.record_count::<R>()?;
        Ok(self.0.chunks_exact(R::SIZE).map(R::decode))
    }
}

impl AsRef<[u8]> for Chunk {
    fn as_ref(&self) -> &[u8] {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    #[test]
    fn record_sizes() {
        let sk = SecretKey::derive(b"d");
        let eo = EntryObject::new(&sk, ContentLink::of(b"sealed"));
        assert_eq!(eo.encode().len(), 97);
        assert_eq!(eo.signer(), Ok(sk.address()));
        let vo = VoteObject::new(&sk, Address([3; 20]));
        let bytes = vo.encode();
        assert_eq!(bytes.len(), 85);
        assert_eq!(bytes[0], vo.vrs.v);
        assert_eq!(&bytes[65..], &[3u8; 20]);
        assert_eq!(vo.signer(), Ok(sk.address()));
    }

    #[test]
    fn chunk_split_and_errors() {
        let keys: Vec<SecretKey> = (0..3u8).map(|i| SecretKey::derive(&[i])).collect();
        let votes: Vec<VoteObject> =
            keys.iter().map(|k| VoteObject::new(k, Address([9; 20]))).collect();
        let chunk = Chunk::from_records(&votes);
        assert_eq!(chunk.record_count::<VoteObject>(), Ok(3));
        for (i, v) in votes.iter().enumerate() {
            assert_eq!(chunk.split::<VoteObject>(i), Ok(*v));
        }
        assert_eq!(
            chunk.split::<VoteObject>(3),
            Err(ChunkError::IndexOutOfRange { index: 3, count: 3 })
        );
        let bad = Chunk(vec![0; 86]);
        assert_eq!(bad.record_count::<VoteObject>(), Err(ChunkError::Malformed { len: 86, record: 85 }));
        assert_eq!(Chunk::default().record_count::<VoteObject>(), Ok(0));
    }

    proptest! {
        #[test]
        fn split_is_total_and_inverse(raw in proptest::collection::vec(any::<[u8; 32]>(), 1..6)) {
            let eos: Vec<EntryObject> = raw.iter().map(|r| EntryObject {
                vrs: RecoverableSignature { v: r[0], r: *r, s: keccak256(r).0 },
                link: ContentLink(Hash256(*r)),
            }).collect();
            let chunk = Chunk::from_records(&eos);
            prop_assert_eq!(chunk.as_bytes().len(), eos.len() * EO_SIZE);
            for (i, eo) in eos.iter().enumerate() {
                prop_assert_eq!(chunk.split::<EntryObject>(i).unwrap(), *eo);
            }
        }
    }
}
