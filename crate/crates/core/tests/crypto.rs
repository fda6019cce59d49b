use std::collections::BTreeSet;

use nfcrowd_core::crypto::*;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn bytes(rng: &mut ChaCha8Rng, max: usize) -> Vec<u8> {
    let mut v = vec![0u8; (rng.next_u32() as usize) % (max + 1)];
    rng.fill_bytes(&mut v);
    v
}

fn leaves(n: usize) -> Vec<Vec<u8>> {
    (0..n).map(|i| format!("leaf-{i}").into_bytes()).collect()
}

#[test]
fn merkle_round_trip_for_every_shape_up_to_64() {
    for n in 1..=64 {
        let l = leaves(n);
        let root = merkle_root(&l).unwrap();
        for i in 0..n {
            let proof = merkle_prove(&l, i).unwrap();
            assert!(merkle_verify(&root, &keccak256(&l[i]), &proof), "n={n} i={i}");
            assert!(proof.siblings.len() <= 6);
        }
    }
}

#[test]
fn forged_proofs_are_rejected() {
    let mut r = rng(7);
    for trial in 0..10_000 {
        let n = 1 + (r.next_u32() as usize % 64);
        let l = leaves(n);
        let root = merkle_root(&l).unwrap();
        let i = r.next_u32() as usize % n;
        let mut proof = merkle_prove(&l, i).unwrap();
        let mut leaf = keccak256(&l[i]);
        match trial % 4 {
            0 => leaf = keccak256(&bytes(&mut r, 40)),
            1 if !proof.siblings.is_empty() => {
                let k = r.next_u32() as usize % proof.siblings.len();
                proof.siblings[k].0[r.next_u32() as usize % 32] ^= 1 << (r.next_u32() % 8);
            }
            2 if n > 1 => {
                let j = (i + 1 + r.next_u32() as usize % (n - 1)) % n;
                leaf = keccak256(&l[j]);
            }
            3 => proof.siblings.push(keccak256(&bytes(&mut r, 8))),
            _ => leaf = keccak256(b"not a leaf"),
        }
        assert!(!merkle_verify(&root, &leaf, &proof), "trial {trial}");
    }
}

#[test]
fn honest_signatures_recover_the_signer() {
    let mut r = rng(11);
    for _ in 0..10_000 {
        let key = SecretKey::derive(&bytes(&mut r, 32));
        let digest = keccak256(&bytes(&mut r, 64));
        let sig = sign(&key, &digest);
        assert_eq!(recover(&digest, &sig), Ok(key.address()));
        let round = RecoverableSignature::from_bytes(&sig.to_bytes());
        assert_eq!(round, sig);
    }
}

#[test]
fn random_signatures_never_recover_the_signer() {
    let mut r = rng(13);
    let key = SecretKey::derive(b"victim");
    let digest = keccak256(b"message");
    let mut hits = 0;
    for _ in 0..100_000 {
        let mut raw = [0u8; SIGNATURE_SIZE];
        r.fill_bytes(&mut raw);
        if r.next_u32().is_multiple_of(2) {
            raw[0] = 27 + (raw[0] & 1);
        }
        let sig = RecoverableSignature::from_bytes(&raw);
        if recover(&digest, &sig) == Ok(key.address()) {
            hits += 1;
        }
    }
    assert_eq!(hits, 0);
}

#[test]
fn store_round_trips_random_blobs() {
    let mut r = rng(17);
    let mut store = ContentStore::new();
    let blobs: Vec<Vec<u8>> = (0..1000).map(|_| bytes(&mut r, 512)).collect();
    let links: Vec<ContentLink> = blobs.iter().map(|b| store.store(b)).collect();
    for (b, link) in blobs.iter().zip(&links) {
        assert_eq!(store.fetch(link).unwrap(), b.as_slice());
        assert_eq!(*link, ContentLink::of(b));
    }
    assert!(store.fetch(&ContentLink::of(b"never stored \xff")).is_err());
}

#[test]
fn distinct_contents_get_distinct_links() {
    let mut r = rng(19);
    let mut contents = BTreeSet::new();
    let mut links = BTreeSet::new();
    while contents.len() < 100_000 {
        let c = bytes(&mut r, 24);
        if contents.insert(c.clone()) {
            assert!(links.insert(ContentLink::of(&c)));
        }
    }
}

#[test]
fn sealed_blob_opens_only_with_its_key() {
    let mut r = rng(23);
    for i in 0..200u32 {
        let mut secret = [0u8; 32];
        r.fill_bytes(&mut secret);
        let keys = SealingKeyPair::from_secret(secret);
        let msg = bytes(&mut r, 300);
        let blob = seal(&keys, &msg);
        let parsed = SealedBlob::from_bytes(&blob.to_bytes()).unwrap();
        assert_eq!(open_seal(&keys.secret, &parsed).unwrap(), msg);
        let mut wrong = secret;
        wrong[(i % 32) as usize] ^= 0x80;
        assert!(open_seal(&wrong, &parsed).is_err());
    }
}
