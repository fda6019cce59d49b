use alloc::vec::Vec;

use crate::agency::{Chunk, Record};
use crate::crypto::{merkle_prove, merkle_root, CryptoError, Hash256, MerkleProof};

/// Records grouped into fixed-size chunks under one Merkle root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AggregationBatch {
    pub chunk_size: usize,
    pub chunks: Vec<Chunk>,
    pub root: Hash256,
}

impl AggregationBatch {
    /// An empty record list still yields one empty chunk, so a root always exists.
    pub fn new<R: Record>(records: &[R], chunk_size: usize) -> Self {
        assert!(chunk_size > 0, "chunk size must be positive");
        let mut chunks: Vec<Chunk> = records.chunks(chunk_size).map(Chunk::from_records).collect();
        if chunks.is_empty() {
            chunks.push(Chunk::default());
        }
        let root = merkle_root(&chunks).expect("at least one chunk");
        AggregationBatch { chunk_size, chunks, root }
    }

    pub fn prove(&self, index: usize) -> Result<MerkleProof, CryptoError> {
        merkle_prove(&self.chunks, index)
    }
}

/// Root over published chunks, if any.
pub fn root_of(chunks: &[Chunk]) -> Option<Hash256> {
    merkle_root(chunks).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agency::VoteObject;
    use crate::crypto::{merkle_verify, SecretKey};
    use crate::ledger::Address;

    #[test]
    fn partitions_in_order() {
        let vos: Vec<VoteObject> = (0..7u8)
            .map(|i| VoteObject::new(&SecretKey::derive(&[i]), Address([i; 20])))
            .collect();
        let b = AggregationBatch::new(&vos, 3);
        assert_eq!(b.chunks.len(), 3);
        let flat: Vec<VoteObject> = b.chunks.iter().flat_map(|c| c.records::<VoteObject>().unwrap()).collect();
        assert_eq!(flat, vos);
        for (i, c) in b.chunks.iter().enumerate() {
            assert!(merkle_verify(&b.root, &c.digest(), &b.prove(i).unwrap()));
        }
    }

    #[test]
    fn empty_batch_has_one_chunk() {
        let b = AggregationBatch::new::<VoteObject>(&[], 50);
        assert_eq!(b.chunks, alloc::vec![Chunk::default()]);
    }
}
