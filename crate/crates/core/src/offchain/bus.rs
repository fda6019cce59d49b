use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::ledger::Address;

/// Four-byte message tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Topic(pub [u8; 4]);

impl Topic {
    pub const ENTRY: Topic = Topic(*b"EO\0\0");
    pub const VOTE: Topic = Topic(*b"VO\0\0");
    pub const SEALING_KEY: Topic = Topic(*b"SKEY");
    pub const ENTRY_CHUNKS: Topic = Topic(*b"EOCH");
    pub const VOTE_CHUNKS: Topic = Topic(*b"VOCH");
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OffchainMessage {
    pub topic: Topic,
    pub sender: Address,
    /// `None` is a broadcast.
    pub recipient: Option<Address>,
    pub payload: Vec<u8>,
    pub sent_at: u64,
    pub delivered_at: u64,
}

impl OffchainMessage {
    pub fn is_for(&self, agent: &Address) -> bool {
        self.recipient.is_none_or(|r| r == *agent)
    }
}

/// Synchronous message bus: each message is delivered after a seeded delay in
/// `[1, delta]`.
#[derive(Debug, Clone)]
pub struct MessageBus {
    delta: u64,
    rng: ChaCha8Rng,
    pending: Vec<(u64, OffchainMessage)>,
    delivered: Vec<OffchainMessage>,
    sequence: u64,
}

impl MessageBus {
    pub fn new(delta: u64, seed: u64) -> Self {
        assert!(delta >= 1, "synchrony bound must be positive");
        MessageBus { delta, rng: ChaCha8Rng::seed_from_u64(seed), pending: Vec::new(), delivered: Vec::new(), sequence: 0 }
    }

    pub fn delta(&self) -> u64 {
        self.delta
    }

    pub fn send(&mut self, topic: Topic, sender: Address, recipient: Option<Address>, payload: Vec<u8>, now: u64) {
        let delay = 1 + self.rng.next_u64() % self.delta;
        let msg = OffchainMessage { topic, sender, recipient, payload, sent_at: now, delivered_at: now + delay };
        self.pending.push((self.sequence, msg));
        self.sequence += 1;
    }

    /// Moves every message due by `now` into the delivery log.
    pub fn deliver(&mut self, now: u64) {
        let mut due: Vec<(u64, OffchainMessage)> = Vec::new();
        let mut i = 0;
        while i < self.pending.len() {
            if self.pending[i].1.delivered_at <= now {
                due.push(self.pending.swap_remove(i));
            } else {
                i += 1;
            }
        }
        due.sort_by_key(|(seq, m)| (m.delivered_at, *seq));
        self.delivered.extend(due.into_iter().map(|(_, m)| m));
    }

    pub fn delivered(&self) -> &[OffchainMessage] {
        &self.delivered
    }

    pub fn in_flight(&self) -> usize {
        self.pending.len()
    }
}

/// A reader's position in the delivery log.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Cursor(usize);

impl Cursor {
    /// Messages for `agent` delivered since the last read.
    pub fn read<'a>(&mut self, bus: &'a MessageBus, agent: Address) -> impl Iterator<Item = &'a OffchainMessage> {
        let start = self.0;
        self.0 = bus.delivered.len();
        bus.delivered[start..].iter().filter(move |m| m.is_for(&agent))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delivery_within_bound() {
        let mut bus = MessageBus::new(10, 7);
        let a = Address([1; 20]);
        for t in 0..200 {
            bus.send(Topic::VOTE, a, None, alloc::vec![t as u8], t);
        }
        for t in 0..=220 {
            bus.deliver(t);
        }
        assert_eq!(bus.in_flight(), 0);
        for m in bus.delivered() {
            assert!(m.delivered_at > m.sent_at && m.delivered_at <= m.sent_at + 10);
        }
    }

    #[test]
    fn cursor_filters_private_messages() {
        let mut bus = MessageBus::new(1, 0);
        let (a, b) = (Address([1; 20]), Address([2; 20]));
        bus.send(Topic::ENTRY, a, Some(b), alloc::vec![1], 0);
        bus.send(Topic::SEALING_KEY, b, None, alloc::vec![2], 0);
        bus.send(Topic::ENTRY, b, Some(a), alloc::vec![3], 0);
        bus.deliver(1);
        let mut cur = Cursor::default();
        let got: Vec<u8> = cur.read(&bus, b).map(|m| m.payload[0]).collect();
        assert_eq!(got, alloc::vec![1, 2]);
        assert_eq!(cur.read(&bus, b).count(), 0);
    }
}
