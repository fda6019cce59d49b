use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::agency::VoteScope;
use crate::ledger::{
    GasSchedule, Mode, Rates, UsdPricing, Wei, DEFAULT_ETHER_TO_USD, DEFAULT_GAS_TO_ETHER,
};
use crate::offchain::{Role, Strategy};

/// Gas of the refundable countermeasures, per designer and per reviewer.
const SUBMIT_EO_GAS: u64 = 143_978;
const SUBMIT_VO_GAS: u64 = 62_267;

fn default_chunk_size() -> usize {
    50
}
fn default_spacing() -> u64 {
    100
}
fn default_delta() -> u64 {
    10
}
fn default_tick() -> u64 {
    1
}
fn default_gas_to_ether() -> f64 {
    DEFAULT_GAS_TO_ETHER
}
fn default_ether_to_usd() -> f64 {
    DEFAULT_ETHER_TO_USD
}
fn default_reward() -> f64 {
    500.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub mode: Mode,
    pub designers: usize,
    pub reviewers: usize,
    #[serde(default = "default_reward")]
    pub reward_usd: f64,
    #[serde(default = "default_chunk_size")]
    pub chunk_size: usize,
    /// Length of every timed phase, in seconds.
    #[serde(default = "default_spacing")]
    pub phase_spacing: u64,
    /// Synchrony bound of the message bus.
    #[serde(default = "default_delta")]
    pub delta: u64,
    #[serde(default = "default_tick")]
    pub tick: u64,
    #[serde(default)]
    pub client: Strategy,
    /// Strategies by designer index; unlisted designers are honest.
    #[serde(default)]
    pub designer_strategies: BTreeMap<usize, Strategy>,
    #[serde(default)]
    pub reviewer_strategies: BTreeMap<usize, Strategy>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_gas_to_ether")]
    pub gas_to_ether: f64,
    #[serde(default = "default_ether_to_usd")]
    pub ether_to_usd: f64,
    #[serde(default)]
    pub pricing: UsdPricing,
    #[serde(default)]
    pub client_deposit_wei: Option<Wei>,
    #[serde(default)]
    pub member_deposit_wei: Option<Wei>,
    #[serde(default)]
    pub vote_scope: VoteScope,
}

impl ScenarioConfig {
    pub fn honest(mode: Mode, designers: usize, reviewers: usize) -> Self {
        ScenarioConfig {
            mode,
            designers,
            reviewers,
            reward_usd: default_reward(),
            chunk_size: default_chunk_size(),
            phase_spacing: default_spacing(),
            delta: default_delta(),
            tick: default_tick(),
            client: Strategy::honest(),
            designer_strategies: BTreeMap::new(),
            reviewer_strategies: BTreeMap::new(),
            seed: 0,
            gas_to_ether: default_gas_to_ether(),
            ether_to_usd: default_ether_to_usd(),
            pricing: UsdPricing::default(),
            client_deposit_wei: None,
            member_deposit_wei: None,
            vote_scope: VoteScope::default(),
        }
    }

    pub fn rates(&self) -> Rates {
        Rates { gas_to_ether: self.gas_to_ether, ether_to_usd: self.ether_to_usd }
    }

    pub fn schedule(&self) -> GasSchedule {
        GasSchedule::reference(self.mode).with_rates(self.rates()).with_pricing(self.pricing)
    }

    pub fn designer_strategy(&self, i: usize) -> Strategy {
        self.designer_strategies.get(&i).cloned().unwrap_or_default()
    }

    pub fn reviewer_strategy(&self, i: usize) -> Strategy {
        self.reviewer_strategies.get(&i).cloned().unwrap_or_default()
    }

    pub fn reward_wei(&self) -> Wei {
        self.rates().usd_to_wei(self.reward_usd)
    }

    /// Twice the worst-case refunds (half fees of every entry and vote
    /// self-submission), so exclusion refunds cannot exhaust it.
    pub fn client_deposit(&self) -> Wei {
        if self.mode == Mode::Strawman {
            return 0;
        }
        self.client_deposit_wei.unwrap_or_else(|| {
            let gas = self.designers as u64 * SUBMIT_EO_GAS + self.reviewers as u64 * SUBMIT_VO_GAS;
            gas as Wei * self.rates().gas_price_wei()
        })
    }

    /// About four on-chain votes.
    pub fn member_deposit(&self) -> Wei {
        self.member_deposit_wei.unwrap_or(SUBMIT_VO_GAS as Wei * self.rates().gas_price_wei() * 4)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let mut problems: Vec<String> = Vec::new();
        let mut bad = |m: &str| problems.push(m.into());
        if self.chunk_size == 0 {
            bad("chunk_size must be positive");
        }
        if self.tick == 0 || self.delta == 0 {
            bad("tick and delta must be positive");
        }
        if self.tick > 0 && (!self.delta.is_multiple_of(self.tick) || !self.phase_spacing.is_multiple_of(self.tick)) {
            bad("delta and phase_spacing must be multiples of tick");
        }
        if self.phase_spacing <= 2 * self.delta {
            bad("phase_spacing must exceed twice the synchrony bound");
        }
        if !(self.reward_usd.is_finite() && self.reward_usd >= 0.0) {
            bad("reward_usd must be a non-negative number");
        }
        if !(self.gas_to_ether > 0.0 && self.ether_to_usd > 0.0) {
            bad("conversion rates must be positive");
        }
        if self.mode == Mode::NfCrowd && self.member_deposit() == 0 && self.reviewers > 0 {
            bad("member deposit must be positive");
        }
        if self.designer_strategies.keys().any(|i| *i >= self.designers) {
            bad("designer strategy index out of range");
        }
        if self.reviewer_strategies.keys().any(|i| *i >= self.reviewers) {
            bad("reviewer strategy index out of range");
        }
        let (nd, nr) = (self.designers, self.reviewers);
        let mut strategies = alloc::vec![(Role::Client, &self.client)];
        strategies.extend(self.designer_strategies.values().map(|s| (Role::Designer, s)));
        strategies.extend(self.reviewer_strategies.values().map(|s| (Role::Reviewer, s)));
        for (role, s) in strategies {
            if let Err(e) = s.validate(role, nd, nr) {
                problems.push(alloc::format!("{role:?}: {e}"));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(HarnessError::InvalidConfig(problems.join("; ")))
        }
    }
}
