//! Hashing, recoverable signatures, Merkle commitments, a content-addressed
//! store and the proposal sealing abstraction.

mod hash;
mod merkle;
mod seal;
mod sig;
mod store;

pub use hash::{keccak256, Hash256};
pub use merkle::{merkle_prove, merkle_root, merkle_root_of_digests, merkle_verify, MerkleProof};
pub use seal::{open_seal, seal, SealedBlob, SealingKeyPair};
pub use sig::{recover, sign, RecoverableSignature, SecretKey, SIGNATURE_SIZE};
pub use store::{ContentLink, ContentStore};

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum CryptoError {
    #[error("malformed signature")]
    MalformedSignature,
    #[error("invalid secret key")]
    InvalidSecretKey,
    #[error("merkle tree needs at least one leaf")]
    EmptyLeaves,
    #[error("leaf index {index} out of range for {len} leaves")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("content not found")]
    NotFound,
    #[error("sealing key does not match")]
    KeyMismatch,
    #[error("malformed sealed blob")]
    MalformedBlob,
}
