//! Regression digests: one hex digest per line, hashes first, then Merkle
//! roots.

use nfcrowd_core::crypto::{keccak256, merkle_root, Hash256};

pub const HASH_INPUTS: [&[u8]; 4] = [b"", b"abc", b"nfcrowd", &[0u8; 200]];

/// Leaf `i` of the Merkle vectors.
pub fn leaf(i: usize) -> Vec<u8> {
    format!("leaf {i}").into_bytes()
}

pub const MERKLE_LEAF_COUNTS: [usize; 8] = [1, 2, 3, 4, 5, 7, 8, 33];

pub fn vectors() -> Vec<Hash256> {
    let mut out: Vec<Hash256> = HASH_INPUTS.iter().map(|m| keccak256(m)).collect();
    for n in MERKLE_LEAF_COUNTS {
        let leaves: Vec<Vec<u8>> = (0..n).map(leaf).collect();
        out.push(merkle_root(&leaves).expect("non-empty"));
    }
    out
}

pub fn render(vectors: &[Hash256]) -> String {
    vectors.iter().map(|h| format!("{h}\n")).collect()
}

pub fn parse(text: &str) -> Option<Vec<Hash256>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| {
            let hex = l.strip_prefix("0x").unwrap_or(l);
            if hex.len() != 64 {
                return None;
            }
            let mut out = [0u8; 32];
            for (i, b) in out.iter_mut().enumerate() {
                *b = u8::from_str_radix(hex.get(2 * i..2 * i + 2)?, 16).ok()?;
            }
            Some(Hash256(out))
        })
        .collect()
}
