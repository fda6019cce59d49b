use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{run_scenario, HarnessError, ScenarioConfig, ScenarioReport};
use crate::offchain::{Behavior, Strategy};

/// How the reviewers other than the single honest one behave.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Colluders {
    /// Vote normally but never audit.
    Passive,
    /// Never audit and double-vote.
    DoubleVoting,
}

impl Colluders {
    pub fn label(&self) -> &'static str {
        match self {
            Colluders::Passive => "passive colluders",
            Colluders::DoubleVoting => "double-voting colluders",
        }
    }

    fn strategy(&self) -> Strategy {
        match self {
            Colluders::Passive => Strategy::of([Behavior::SkipAudit]),
            Colluders::DoubleVoting => Strategy::of([Behavior::SkipAudit, Behavior::DoubleVote]),
        }
    }
}

#[derive(Debug, Clone)]
pub struct MatrixRow {
    pub label: String,
    pub config: ScenarioConfig,
    pub report: ScenarioReport,
}

impl MatrixRow {
    pub fn passed(&self) -> bool {
        self.report.passed()
    }
}

fn indices(it: impl IntoIterator<Item = usize>, below: usize) -> BTreeSet<usize> {
    it.into_iter().filter(|i| *i < below).collect()
}

/// The all-honest baseline followed by every deviation under both colluder
/// profiles. The highest-index reviewer is the one honest reviewer.
pub fn adversary_matrix(base: &ScenarioConfig) -> Vec<(String, ScenarioConfig)> {
    let mut out = Vec::new();
    let mut honest = base.clone();
    honest.client = Strategy::honest();
    honest.designer_strategies.clear();
    honest.reviewer_strategies.clear();
    out.push((String::from("all honest"), honest.clone()));
    if base.reviewers == 0 {
        return out;
    }
    let (nd, nr) = (base.designers, base.reviewers);
    let honest_reviewer = nr - 1;
    let deviations: Vec<(&str, Behavior)> = alloc::vec![
        ("exclude entries", Behavior::ExcludeEntries(indices([0, 1], nd))),
        ("exclude votes", Behavior::ExcludeVotes(indices([honest_reviewer, 0, 1], nr))),
        ("double votes", Behavior::DoubleVote),
        ("wrong off-chain winners", Behavior::WrongOffchainWinners),
        ("withhold verdict", Behavior::WithholdVerdict),
        ("withhold roots", Behavior::WithholdRoots),
    ];
    for profile in [Colluders::Passive, Colluders::DoubleVoting] {
        for (name, behavior) in &deviations {
            let mut cfg = honest.clone();
            for i in 0..honest_reviewer {
                cfg.reviewer_strategies.insert(i, profile.strategy());
            }
            if *behavior == Behavior::DoubleVote {
                for i in 0..honest_reviewer.min(3) {
                    let s = cfg.reviewer_strategy(i).with(Behavior::DoubleVote);
                    cfg.reviewer_strategies.insert(i, s);
                }
            } else {
                cfg.client = Strategy::of([behavior.clone()]);
            }
            out.push((format!("{name}, {}", profile.label()), cfg));
        }
    }
    out
}

pub fn run_adversary_matrix(base: &ScenarioConfig) -> Result<Vec<MatrixRow>, HarnessError> {
    adversary_matrix(base)
        .into_iter()
        .map(|(label, config)| Ok(MatrixRow { report: run_scenario(&config)?, label, config }))
        .collect()
}
