use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Client,
    Designer,
    Reviewer,
}

/// One deviation from the protocol. Index sets refer to designer or
/// reviewer positions in the crowd.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Behavior {
    Honest,
    /// Client leaves these designers' entries out of the committed tree.
    ExcludeEntries(BTreeSet<usize>),
    /// Client leaves these reviewers' votes out of the committed tree.
    ExcludeVotes(BTreeSet<usize>),
    /// Client posts a wrong off-chain verdict.
    WrongOffchainWinners,
    /// Client never posts a verdict.
    WithholdVerdict,
    /// Client never posts the entry and vote roots.
    WithholdRoots,
    /// Designer never reveals its sealing key.
    WithholdKey,
    /// Reviewer votes off-chain and again on-chain.
    DoubleVote,
    /// Reviewer never audits.
    SkipAudit,
}

impl Behavior {
    pub fn role(&self) -> Option<Role> {
        match self {
            Behavior::Honest => None,
            Behavior::ExcludeEntries(_)
            | Behavior::ExcludeVotes(_)
            | Behavior::WrongOffchainWinners
            | Behavior::WithholdVerdict
            | Behavior::WithholdRoots => Some(Role::Client),
            Behavior::WithholdKey => Some(Role::Designer),
            Behavior::DoubleVote | Behavior::SkipAudit => Some(Role::Reviewer),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("honest cannot be combined with deviations")]
    HonestWithDeviation,
    #[error("{behavior:?} does not apply to a {role:?}")]
    WrongRole { behavior: Behavior, role: Role },
    #[error("index {index} out of range for {len} agents")]
    IndexOutOfRange { index: usize, len: usize },
}

/// A set of behaviors; empty or `[Honest]` means honest.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Strategy {
    pub behaviors: Vec<Behavior>,
}

impl Strategy {
    pub fn honest() -> Self {
        Strategy::default()
    }

    pub fn of(behaviors: impl IntoIterator<Item = Behavior>) -> Self {
        let mut s = Strategy::default();
        for b in behaviors {
            s = s.with(b);
        }
        s
    }

    pub fn with(mut self, behavior: Behavior) -> Self {
        if behavior != Behavior::Honest && !self.behaviors.contains(&behavior) {
            self.behaviors.push(behavior);
            self.behaviors.sort();
        }
        self
    }

    pub fn is_honest(&self) -> bool {
        self.behaviors.iter().all(|b| *b == Behavior::Honest)
    }

    pub fn has(&self, behavior: &Behavior) -> bool {
        self.behaviors.contains(behavior)
    }

    pub fn excluded_entries(&self) -> BTreeSet<usize> {
        self.index_set(|b| match b {
            Behavior::ExcludeEntries(s) => Some(s),
            _ => None,
        })
    }

    pub fn excluded_votes(&self) -> BTreeSet<usize> {
        self.index_set(|b| match b {
            Behavior::ExcludeVotes(s) => Some(s),
            _ => None,
        })
    }

    fn index_set(&self, pick: impl Fn(&Behavior) -> Option<&BTreeSet<usize>>) -> BTreeSet<usize> {
        self.behaviors.iter().filter_map(pick).flatten().copied().collect()
    }

    pub fn validate(&self, role: Role, designers: usize, reviewers: usize) -> Result<(), StrategyError> {
        if self.behaviors.len() > 1 && self.behaviors.contains(&Behavior::Honest) {
            return Err(StrategyError::HonestWithDeviation);
        }
        for b in &self.behaviors {
            if b.role().is_some_and(|r| r != role) {
                return Err(StrategyError::WrongRole { behavior: b.clone(), role });
            }
            let (set, len) = match b {
                Behavior::ExcludeEntries(s) => (s, designers),
                Behavior::ExcludeVotes(s) => (s, reviewers),
                _ => continue,
            };
            if let Some(&index) = set.iter().find(|i| **i >= len) {
                return Err(StrategyError::IndexOutOfRange { index, len });
            }
        }
        Ok(())
    }
}
