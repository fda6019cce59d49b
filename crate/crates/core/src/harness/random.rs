use alloc::collections::BTreeSet;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use super::ScenarioConfig;
use crate::ledger::Mode;
use crate::offchain::{Behavior, Strategy};

fn below(rng: &mut ChaCha8Rng, n: u64) -> u64 {
    rng.next_u64() % n
}

fn coin(rng: &mut ChaCha8Rng, one_in: u64) -> bool {
    below(rng, one_in) == 0
}

fn subset(rng: &mut ChaCha8Rng, len: usize) -> BTreeSet<usize> {
    (0..len).filter(|_| coin(rng, 3)).collect()
}

/// A seeded NF-Crowd scenario with `2 ≤ n ≤ max_n` agents and a random
/// subset of deviations spread over every role.
pub fn random_scenario(seed: u64, max_n: usize) -> ScenarioConfig {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 2 + below(&mut rng, max_n.max(2) as u64 - 1) as usize;
    let designers = 1 + below(&mut rng, n as u64 - 1) as usize;
    let reviewers = n - designers;
    let mut cfg = ScenarioConfig::honest(Mode::NfCrowd, designers, reviewers);
    cfg.seed = seed;

    let mut client = Strategy::honest();
    if coin(&mut rng, 4) {
        client = client.with(Behavior::ExcludeEntries(subset(&mut rng, designers)));
    }
    if coin(&mut rng, 4) {
        client = client.with(Behavior::ExcludeVotes(subset(&mut rng, reviewers)));
    }
    for b in [Behavior::WrongOffchainWinners, Behavior::WithholdVerdict, Behavior::WithholdRoots] {
        if coin(&mut rng, 4) {
            client = client.with(b);
        }
    }
    cfg.client = client;
    for i in 0..designers {
        if coin(&mut rng, 10) {
            cfg.designer_strategies.insert(i, Strategy::of([Behavior::WithholdKey]));
        }
    }
    for i in 0..reviewers {
        let mut s = Strategy::honest();
        for b in [Behavior::DoubleVote, Behavior::SkipAudit] {
            if coin(&mut rng, 5) {
                s = s.with(b);
            }
        }
        if !s.is_honest() {
            cfg.reviewer_strategies.insert(i, s);
        }
    }
    cfg
}
