//! Off-chain side of the protocol: a synchronous message bus, record
//! aggregation, and the client, designer and reviewer agents with their
//! honest or adversarial strategies.

mod agents;
mod batch;
mod bus;
mod strategy;

pub use agents::{AgentId, ClientAgent, Crowd, DesignerAgent, LogRecord, ReviewerAgent, Simulation, World};
pub use batch::{root_of, AggregationBatch};
pub use bus::{Cursor, MessageBus, OffchainMessage, Topic};
pub use strategy::{Behavior, Role, Strategy, StrategyError};

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::agency::argmax_winners;
use crate::crypto::keccak256;
use crate::ledger::Address;

/// Winners over `votes` given as (reviewer, designer): one vote per reviewer
/// (the first), dishonest reviewers dropped, designers outside `entry_set`
/// ignored.
pub fn local_tally(
    votes: &[(Address, Address)],
    dishonest: &BTreeSet<Address>,
    entry_set: &BTreeSet<Address>,
) -> Vec<Address> {
    let mut seen = BTreeSet::new();
    let mut counts = alloc::collections::BTreeMap::new();
    for (reviewer, designer) in votes {
        if dishonest.contains(reviewer) || !seen.insert(*reviewer) {
            continue;
        }
        *counts.entry(*designer).or_insert(0u64) += 1;
    }
    argmax_winners(&counts, entry_set)
}

/// The designer a reviewer votes for among the proposals it could read.
pub fn vote_choice(seed: u64, reviewer: usize, readable: &BTreeSet<Address>) -> Option<Address> {
    if readable.is_empty() {
        return None;
    }
    let mut material = [0u8; 24];
    material[..8].copy_from_slice(b"vote-for");
    material[8..16].copy_from_slice(&seed.to_be_bytes());
    material[16..].copy_from_slice(&(reviewer as u64).to_be_bytes());
    let h = keccak256(&material);
    let pick = u64::from_be_bytes(h.0[..8].try_into().unwrap()) % readable.len() as u64;
    readable.iter().nth(pick as usize).copied()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(b: u8) -> Address {
        Address([b; 20])
    }

    #[test]
    fn tally_dedupes_and_filters() {
        let entries: BTreeSet<Address> = [a(1), a(2), a(3)].into_iter().collect();
        assert!(local_tally(&[], &BTreeSet::new(), &entries).is_empty());
        let votes = [(a(10), a(1)), (a(11), a(1)), (a(12), a(1)), (a(13), a(2)), (a(14), a(2)), (a(15), a(2)), (a(16), a(3))];
        assert_eq!(local_tally(&votes, &BTreeSet::new(), &entries), alloc::vec![a(1), a(2)]);
        let dishonest: BTreeSet<Address> = [a(10)].into_iter().collect();
        assert_eq!(local_tally(&votes, &dishonest, &entries), alloc::vec![a(2)]);
        let dup = [(a(10), a(3)), (a(10), a(1)), (a(11), a(1))];
        assert_eq!(local_tally(&dup, &BTreeSet::new(), &entries), alloc::vec![a(1), a(3)]);
        let outside = [(a(10), a(9)), (a(11), a(9)), (a(12), a(2))];
        assert_eq!(local_tally(&outside, &BTreeSet::new(), &entries), alloc::vec![a(2)]);
    }

    #[test]
    fn choice_is_deterministic_and_in_range() {
        let set: BTreeSet<Address> = (1..=5).map(a).collect();
        for r in 0..50 {
            let c = vote_choice(9, r, &set).unwrap();
            assert!(set.contains(&c));
            assert_eq!(vote_choice(9, r, &set), Some(c));
        }
        assert_eq!(vote_choice(9, 0, &BTreeSet::new()), None);
    }
}
