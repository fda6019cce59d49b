use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::call::ContestId;
use super::phase::{Deadlines, Phase};
use crate::crypto::{ContentLink, Hash256};
use crate::ledger::{Address, Function, Mode, Wei};

/// Operation that put a vote into an on-chain tally.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VoteSource {
    SubmitVo,
    ReloadChunkVo,
}

impl VoteSource {
    pub fn function(&self) -> Function {
        match self {
            VoteSource::SubmitVo => Function::SubmitVo,
            VoteSource::ReloadChunkVo => Function::ReloadChunkVo,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TallyEntry {
    pub designer: Address,
    pub source: VoteSource,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contest {
    pub id: ContestId,
    pub mode: Mode,
    pub created_at: u64,
    pub deadlines: Deadlines,
    pub description: ContentLink,
    pub reward: Wei,
    pub client_deposit: Wei,
    pub client_deposit_remaining: Wei,
    pub root_eo: Option<Hash256>,
    pub root_vo: Option<Hash256>,
    pub onchain_eos: Vec<(Address, ContentLink)>,
    /// On-chain votes keyed by reviewer.
    pub onchain_votes: BTreeMap<Address, TallyEntry>,
    /// Off-chain votes reloaded from proven chunks, keyed by reviewer.
    pub reloaded_votes: BTreeMap<Address, TallyEntry>,
    pub voted_on_chain: BTreeSet<Address>,
    pub reloaded_chunks: BTreeSet<Hash256>,
    pub dishonest: BTreeSet<Address>,
    pub offchain_winners: Option<Vec<Address>>,
    pub onchain_winners: Option<Vec<Address>>,
    pub final_winners: Option<Vec<Address>>,
    pub finalized: bool,
    pub aborted: bool,
    pub refunds_paid: Wei,
    pub confiscated: Wei,
    pub client_penalty: Wei,
    pub awards: BTreeMap<Address, Wei>,
    pub awards_withdrawn: BTreeSet<Address>,
    pub reward_shares: BTreeMap<Address, Wei>,
    pub rewards_withdrawn: BTreeSet<Address>,
    pub residual_to_client: Wei,
}

impl Contest {
    pub(crate) fn new(
        id: ContestId,
        mode: Mode,
        created_at: u64,
        deadlines: Deadlines,
        description: ContentLink,
        reward: Wei,
        deposit: Wei,
    ) -> Self {
        Contest {
            id,
            mode,
            created_at,
            deadlines,
            description,
            reward,
            client_deposit: deposit,
            client_deposit_remaining: deposit,
            root_eo: None,
            root_vo: None,
            onchain_eos: Vec::new(),
            onchain_votes: BTreeMap::new(),
            reloaded_votes: BTreeMap::new(),
            voted_on_chain: BTreeSet::new(),
            reloaded_chunks: BTreeSet::new(),
            dishonest: BTreeSet::new(),
            offchain_winners: None,
            onchain_winners: None,
            final_winners: None,
            finalized: false,
            aborted: false,
            refunds_paid: 0,
            confiscated: 0,
            client_penalty: 0,
            awards: BTreeMap::new(),
            awards_withdrawn: BTreeSet::new(),
            reward_shares: BTreeMap::new(),
            rewards_withdrawn: BTreeSet::new(),
            residual_to_client: 0,
        }
    }

    pub fn phase(&self, now: u64) -> Phase {
        if now >= self.settlement_time() {
            return Phase::Finalized;
        }
        self.deadlines.phase_at(now)
    }

    /// The strawman contract has no audit phase and settles after the verdict epoch.
    pub fn settlement_time(&self) -> u64 {
        match self.mode {
            Mode::Strawman => self.deadlines.0[3],
            Mode::NfCrowd => self.deadlines.0[5],
        }
    }

    pub fn entrants(&self) -> BTreeSet<Address> {
        self.onchain_eos.iter().map(|(d, _)| *d).collect()
    }

    /// Every vote a verdict may read, keyed by reviewer.
    pub fn verdict_inputs(&self) -> impl Iterator<Item = (&Address, &TallyEntry)> {
        self.onchain_votes.iter().chain(self.reloaded_votes.iter())
    }

    pub fn onchain_vote_counts(&self) -> BTreeMap<Address, u64> {
        counts(self.onchain_votes.values())
    }

    pub fn reloaded_vote_counts(&self) -> BTreeMap<Address, u64> {
        counts(self.reloaded_votes.values())
    }

    pub fn merged_counts(&self) -> BTreeMap<Address, u64> {
        counts(self.verdict_inputs().map(|(_, e)| e))
    }

    /// Liabilities of the contract toward this contest's participants.
    pub fn escrowed(&self) -> Wei {
        let awards: Wei = self
            .awards
            .iter()
            .filter(|(a, _)| !self.awards_withdrawn.contains(*a))
            .map(|(_, w)| *w)
            .sum();
        let held = if self.finalized {
            self.reward_shares
                .iter()
                .filter(|(a, _)| !self.rewards_withdrawn.contains(*a))
                .map(|(_, w)| *w)
                .sum()
        } else {
            self.reward + self.client_deposit_remaining
        };
        held + awards
    }
}

fn counts<'a>(entries: impl Iterator<Item = &'a TallyEntry>) -> BTreeMap<Address, u64> {
    let mut out = BTreeMap::new();
    for e in entries {
        *out.entry(e.designer).or_insert(0) += 1;
    }
    out
}

/// All candidates sharing the maximal positive count, in address order.
pub fn argmax_winners(counts: &BTreeMap<Address, u64>, candidates: &BTreeSet<Address>) -> Vec<Address> {
    let best = candidates.iter().filter_map(|c| counts.get(c)).copied().max().unwrap_or(0);
    if best == 0 {
        return Vec::new();
    }
    candidates.iter().filter(|c| counts.get(*c) == Some(&best)).copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(b: u8) -> Address {
        Address([b; 20])
    }

    #[test]
    fn argmax_ties_and_empty() {
        let counts: BTreeMap<Address, u64> = [(a(1), 3), (a(2), 3), (a(3), 1)].into_iter().collect();
        let cands: BTreeSet<Address> = [a(1), a(2), a(3)].into_iter().collect();
        assert_eq!(argmax_winners(&counts, &cands), alloc::vec![a(1), a(2)]);
        assert!(argmax_winners(&BTreeMap::new(), &cands).is_empty());
        assert!(argmax_winners(&counts, &BTreeSet::new()).is_empty());
        let only3: BTreeSet<Address> = [a(3), a(4)].into_iter().collect();
        assert_eq!(argmax_winners(&counts, &only3), alloc::vec![a(3)]);
    }
}
