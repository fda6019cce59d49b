//! Binary Merkle tree over hashed leaves.
//!
//! Leaves are hashed once; an internal node is `keccak(left ∥ right)`. When a
//! level has an odd number of nodes the last one is promoted unchanged, so
//! no leaf is ever duplicated and proofs carry only real siblings.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{keccak256, CryptoError, Hash256};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MerkleProof {
    pub leaf_index: usize,
    /// Needed to tell which levels promoted the path node without a sibling.
    pub leaf_count: usize,
    /// Bottom-up.
    pub siblings: Vec<Hash256>,
}

pub fn merkle_root<L: AsRef<[u8]>>(leaves: &[L]) -> Result<Hash256, CryptoError> {
    let digests: Vec<Hash256> = leaves.iter().map(|l| keccak256(l.as_ref())).collect();
    merkle_root_of_digests(&digests)
}

pub fn merkle_root_of_digests(digests: &[Hash256]) -> Result<Hash256, CryptoError> {
    if digests.is_empty() {
        return Err(CryptoError::EmptyLeaves);
    }
    let mut level = digests.to_vec();
    while level.len() > 1 {
        level = next_level(&level);
    }
    Ok(level[0])
}

fn next_level(level: &[Hash256]) -> Vec<Hash256> {
    level
        .chunks(2)
        .map(|pair| match pair {
            [l, r] => l.combine(r),
            [single] => *single,
            _ => unreachable!(),
        })
        .collect()
}

pub fn merkle_prove<L: AsRef<[u8]>>(leaves: &[L], index: usize) -> Result<MerkleProof, CryptoError> {
    if leaves.is_empty() {
        return Err(CryptoError::EmptyLeaves);
    }
    if index >= leaves.len() {
        return Err(CryptoError::IndexOutOfRange { index, len: leaves.len() });
    }
    let mut level: Vec<Hash256> = leaves.iter().map(|l| keccak256(l.as_ref())).collect();
    let mut pos = index;
    let mut siblings = Vec::new();
    while level.len() > 1 {
        let sibling = pos ^ 1;
        if sibling < level.len() {
            siblings.push(level[sibling]);
        }
        level = next_level(&level);
        pos /= 2;
    }
    Ok(MerkleProof { leaf_index: index, leaf_count: leaves.len(), siblings })
}

pub fn merkle_verify(root: &Hash256, leaf_digest: &Hash256, proof: &MerkleProof) -> bool {
    if proof.leaf_index >= proof.leaf_count {
        return false;
    }
    let mut acc = *leaf_digest;
    let mut pos = proof.leaf_index;
    let mut width = proof.leaf_count;
    let mut siblings = proof.siblings.iter();
    while width > 1 {
        let sibling = pos ^ 1;
        if sibling < width {
            let Some(s) = siblings.next() else {
                return false;
            };
            acc = if pos.is_multiple_of(2) { acc.combine(s) } else { s.combine(&acc) };
        }
        pos /= 2;
        width = width.div_ceil(2);
    }
    siblings.next().is_none() && acc == *root
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn leaves(n: usize) -> Vec<Vec<u8>> {
        (0..n).map(|i| vec![i as u8; 1 + i % 5]).collect()
    }

    #[test]
    fn single_leaf_tree() {
        let l = [b"only".to_vec()];
        let root = merkle_root(&l).unwrap();
        assert_eq!(root, keccak256(b"only"));
        let proof = merkle_prove(&l, 0).unwrap();
        assert!(proof.siblings.is_empty());
        assert!(merkle_verify(&root, &keccak256(b"only"), &proof));
    }

    #[test]
    fn errors() {
        let empty: [Vec<u8>; 0] = [];
        assert_eq!(merkle_root(&empty), Err(CryptoError::EmptyLeaves));
        assert_eq!(merkle_prove(&empty, 0), Err(CryptoError::EmptyLeaves));
        assert_eq!(
            merkle_prove(&leaves(3), 3),
            Err(CryptoError::IndexOutOfRange { index: 3, len: 3 })
        );
    }

    #[test]
    fn three_leaves_promotes_last() {
        let l = leaves(3);
        let d: Vec<Hash256> = l.iter().map(|x| keccak256(x)).collect();
        assert_eq!(merkle_root(&l).unwrap(), d[0].combine(&d[1]).combine(&d[2]));
        assert_eq!(merkle_prove(&l, 2).unwrap().siblings, vec![d[0].combine(&d[1])]);
    }

    #[test]
    fn five_leaves_exhaustive() {
        let l = leaves(5);
        let root = merkle_root(&l).unwrap();
        for i in 0..5 {
            let proof = merkle_prove(&l, i).unwrap();
            for (j, other) in l.iter().enumerate() {
                assert_eq!(merkle_verify(&root, &keccak256(other), &proof), i == j, "i={i} j={j}");
            }
        }
    }

    #[test]
    fn tampered_leaf_rejected() {
        let l = leaves(5);
        let root = merkle_root(&l).unwrap();
        let proof = merkle_prove(&l, 3).unwrap();
        let mut tampered = l[3].clone();
        tampered[0] ^= 0x01;
        assert!(!merkle_verify(&root, &keccak256(&tampered), &proof));
    }

    #[test]
    fn proof_shape_must_match_leaf_count() {
        let l = leaves(6);
        let root = merkle_root(&l).unwrap();
        let mut proof = merkle_prove(&l, 4).unwrap();
        proof.siblings.push(Hash256::ZERO);
        assert!(!merkle_verify(&root, &keccak256(&l[4]), &proof));
        let mut proof = merkle_prove(&l, 4).unwrap();
        proof.leaf_index = 6;
        assert!(!merkle_verify(&root, &keccak256(&l[4]), &proof));
    }
}
