use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{keccak256, CryptoError, Hash256};

/// Content address of an immutable blob.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ContentLink(pub Hash256);

impl ContentLink {
    pub fn of(content: &[u8]) -> Self {
        ContentLink(keccak256(content))
    }

    pub fn digest(&self) -> &Hash256 {
        &self.0
    }
}

/// In-memory content-addressed store standing in for a distributed file system.
#[derive(Debug, Clone, Default)]
pub struct ContentStore {
    blobs: BTreeMap<Hash256, Vec<u8>>,
}

impl ContentStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn store(&mut self, content: &[u8]) -> ContentLink {
        let link = ContentLink::of(content);
        self.blobs.entry(link.0).or_insert_with(|| content.to_vec());
        link
    }

    pub fn fetch(&self, link: &ContentLink) -> Result<&[u8], CryptoError> {
        self.blobs.get(&link.0).map(Vec::as_slice).ok_or(CryptoError::NotFound)
    }

    pub fn len(&self) -> usize {
        self.blobs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blobs.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_idempotent_links() {
        let mut store = ContentStore::new();
        let a = store.store(b"proposal");
        let b = store.store(b"proposal");
        assert_eq!(a, b);
        assert_eq!(store.len(), 1);
        assert_eq!(store.fetch(&a).unwrap(), b"proposal");
        assert_eq!(store.fetch(&ContentLink::of(b"never")), Err(CryptoError::NotFound));
    }
}
