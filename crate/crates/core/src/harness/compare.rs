use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{run_scenario, HarnessError, ScenarioConfig};
use crate::ledger::Mode;

/// Commission of a centralized crowdsourcing platform.
pub const CENTRALIZED_FEE: f64 = 0.15;

/// Published cost of the external protocol, at the crowd sizes where it is
/// known.
pub const EXTERNAL_REFERENCE: [(usize, f64); 2] = [(10, 22.4), (1000, 140.5)];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub n: usize,
    pub strawman_usd: f64,
    pub nfcrowd_usd: f64,
    pub centralized_fee_usd: f64,
    pub external_usd: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub reward_usd: f64,
    pub rows: Vec<CompareRow>,
    /// Reward above which the NF-Crowd cost undercuts the centralized fee.
    pub break_even_reward_usd: f64,
}

pub fn external_reference(n: usize) -> Option<f64> {
    EXTERNAL_REFERENCE.iter().find(|(k, _)| *k == n).map(|(_, v)| *v)
}

/// All-honest runs of both modes with `n` designers and `n` reviewers.
pub fn compare(scales: &[usize], reward_usd: f64, seed: u64) -> Result<CompareReport, HarnessError> {
    if scales.is_empty() {
        return Err(HarnessError::InvalidConfig("no scales given".into()));
    }
    let mut rows = Vec::with_capacity(scales.len());
    for &n in scales {
        let run = |mode| {
            let mut cfg = ScenarioConfig::honest(mode, n, n);
            cfg.reward_usd = reward_usd;
            cfg.seed = seed;
            run_scenario(&cfg).map(|r| r.total_usd)
        };
        rows.push(CompareRow {
            n,
            strawman_usd: run(Mode::Strawman)?,
            nfcrowd_usd: run(Mode::NfCrowd)?,
            centralized_fee_usd: CENTRALIZED_FEE * reward_usd,
            external_usd: external_reference(n),
        });
    }
    let worst = rows.iter().map(|r| r.nfcrowd_usd).fold(0.0, f64::max);
    Ok(CompareReport { reward_usd, rows, break_even_reward_usd: worst / CENTRALIZED_FEE })
}
