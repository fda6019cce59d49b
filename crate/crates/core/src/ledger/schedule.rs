//! Reference gas schedule of the agency contract and its USD conversion.

use alloc::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::Wei;

pub const WEI_PER_ETHER: f64 = 1e18;
pub const DEFAULT_GAS_TO_ETHER: f64 = 1.67e-8;
pub const DEFAULT_ETHER_TO_USD: f64 = 175.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Function {
    JoinCommunity,
    NewContest,
    SubmitEo,
    RootEo,
    RootVo,
    SubmitVo,
    Verdict,
    OffChainVerdict,
    DoubleVotes,
    ReloadChunkVo,
    OnchainVerdict,
    Finalize,
    WithdrawReward,
    WithdrawAward,
    WithdrawDeposit,
}

impl Function {
    pub const ALL: [Function; 15] = [
        Function::JoinCommunity,
        Function::NewContest,
        Function::SubmitEo,
        Function::RootEo,
        Function::RootVo,
        Function::SubmitVo,
        Function::Verdict,
        Function::OffChainVerdict,
        Function::DoubleVotes,
        Function::ReloadChunkVo,
        Function::OnchainVerdict,
        Function::Finalize,
        Function::WithdrawReward,
        Function::WithdrawAward,
        Function::WithdrawDeposit,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Function::JoinCommunity => "joinCommunity",
            Function::NewContest => "newContest",
            Function::SubmitEo => "submitEO",
            Function::RootEo => "rootEO",
            Function::RootVo => "rootVO",
            Function::SubmitVo => "submitVO",
            Function::Verdict => "verdict",
            Function::OffChainVerdict => "offChainVerdict",
            Function::DoubleVotes => "doubleVotes",
            Function::ReloadChunkVo => "reloadChunkVO",
            Function::OnchainVerdict => "onchainVerdict",
            Function::Finalize => "finalize",
            Function::WithdrawReward => "withdrawReward",
            Function::WithdrawAward => "withdrawAward",
            Function::WithdrawDeposit => "withdrawDeposit",
        }
    }

    pub fn from_name(name: &str) -> Option<Function> {
        Function::ALL.into_iter().find(|f| f.name() == name)
    }

    /// Cost taxonomy of the step the function implements.
    pub fn step_type(&self) -> StepType {
        match self {
            Function::SubmitEo
            | Function::SubmitVo
            | Function::DoubleVotes
            | Function::ReloadChunkVo => StepType::NByOne,
            Function::Verdict | Function::OnchainVerdict => StepType::OneByN,
            _ => StepType::Constant,
        }
    }
}

/// `NByOne`: the number of transactions grows with the crowd.
/// `OneByN`: the cost of one transaction grows with the crowd.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepType {
    Constant,
    NByOne,
    OneByN,
}

/// What the per-item gas of a function is multiplied by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ItemCount {
    Constant,
    /// Entries traversed by the verdict.
    Entries,
    /// Records in the submitted chunk.
    ChunkRecords,
    /// Candidate designers in the merged tally.
    Candidates,
}

/// Published USD price of a function at the default conversion rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UsdQuote {
    pub base: f64,
    pub per_item: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasEntry {
    pub base: u64,
    pub per_item: u64,
    pub items: ItemCount,
    pub quote: Option<UsdQuote>,
    /// Whether receipts of this function count toward a contest's cost.
    pub contest_cost: bool,
}

impl GasEntry {
    pub fn gas(&self, items: u64) -> u64 {
        match self.items {
            ItemCount::Constant => self.base,
            _ => self.base + self.per_item * items,
        }
    }
}

/// How receipts are converted to USD.
///
/// `Quoted` prices each call with the published per-function USD figures
/// (base and per-item coefficients as quoted, already rounded). `Metered`
/// multiplies the metered gas by the conversion rates. The two differ by the
/// rounding baked into the quotes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UsdPricing {
    #[default]
    Quoted,
    Metered,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rates {
    pub gas_to_ether: f64,
    pub ether_to_usd: f64,
}

impl Default for Rates {
    fn default() -> Self {
        Rates { gas_to_ether: DEFAULT_GAS_TO_ETHER, ether_to_usd: DEFAULT_ETHER_TO_USD }
    }
}

impl Rates {
    pub fn gas_price_wei(&self) -> Wei {
        (self.gas_to_ether * WEI_PER_ETHER + 0.5) as Wei
    }

    pub fn usd_per_gas(&self) -> f64 {
        self.gas_to_ether * self.ether_to_usd
    }

    pub fn wei_to_usd(&self, wei: Wei) -> f64 {
        wei as f64 / WEI_PER_ETHER * self.ether_to_usd
    }

    pub fn usd_to_wei(&self, usd: f64) -> Wei {
        (usd / self.ether_to_usd * WEI_PER_ETHER + 0.5) as Wei
    }
}

/// Mode of the contract the schedule was measured on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Strawman,
    NfCrowd,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Strawman => "strawman",
            Mode::NfCrowd => "nfcrowd",
        }
    }
}

/// Gas charged by joinCommunity, which has no published figure.
pub const JOIN_COMMUNITY_GAS: u64 = 45_000;
/// Gas charged by settlement calls (finalize, withdrawals), which have no published figure.
pub const SETTLEMENT_GAS: u64 = 21_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GasSchedule {
    pub mode: Mode,
    entries: BTreeMap<Function, GasEntry>,
    pub rates: Rates,
    pub pricing: UsdPricing,
}

fn quoted(base: u64, per_item: u64, items: ItemCount, usd: f64, usd_per_item: f64) -> GasEntry {
    GasEntry {
        base,
        per_item,
        items,
        quote: Some(UsdQuote { base: usd, per_item: usd_per_item }),
        contest_cost: true,
    }
}

fn flat(base: u64, usd: f64) -> GasEntry {
    quoted(base, 0, ItemCount::Constant, usd, 0.0)
}

fn unquoted(base: u64) -> GasEntry {
    GasEntry { base, per_item: 0, items: ItemCount::Constant, quote: None, contest_cost: false }
}

impl GasSchedule {
    /// Schedule of the contract for the given protocol mode.
    pub fn reference(mode: Mode) -> Self {
        let mut entries = BTreeMap::new();
        entries.insert(Function::SubmitEo, flat(143_978, 0.42));
        entries.insert(Function::SubmitVo, flat(62_267, 0.18));
        for f in [Function::Finalize, Function::WithdrawReward] {
            entries.insert(f, unquoted(SETTLEMENT_GAS));
        }
        match mode {
            Mode::Strawman => {
                entries.insert(Function::NewContest, flat(182_909, 0.53));
                entries.insert(Function::Verdict, quoted(37_227, 2_171, ItemCount::Entries, 0.11, 0.006));
            }
            Mode::NfCrowd => {
                entries.insert(Function::JoinCommunity, unquoted(JOIN_COMMUNITY_GAS));
                entries.insert(Function::NewContest, flat(244_434, 0.71));
                entries.insert(Function::RootEo, flat(45_322, 0.13));
                entries.insert(Function::RootVo, flat(65_956, 0.19));
                entries.insert(Function::OffChainVerdict, flat(44_967, 0.13));
                entries.insert(Function::DoubleVotes, flat(65_844, 0.19));
                entries.insert(
                    Function::ReloadChunkVo,
                    quoted(37_843, 36_578, ItemCount::ChunkRecords, 0.11, 0.11),
                );
                entries.insert(
                    Function::OnchainVerdict,
                    quoted(46_324, 2_171, ItemCount::Candidates, 0.14, 0.006),
                );
                entries.insert(Function::WithdrawAward, unquoted(SETTLEMENT_GAS));
                entries.insert(Function::WithdrawDeposit, unquoted(SETTLEMENT_GAS));
            }
        }
        GasSchedule { mode, entries, rates: Rates::default(), pricing: UsdPricing::default() }
    }

    pub fn with_rates(mut self, rates: Rates) -> Self {
        self.rates = rates;
        self
    }

    pub fn with_pricing(mut self, pricing: UsdPricing) -> Self {
        self.pricing = pricing;
        self
    }

    pub fn entry(&self, function: Function) -> Option<&GasEntry> {
        self.entries.get(&function)
    }

    pub fn functions(&self) -> impl Iterator<Item = (&Function, &GasEntry)> {
        self.entries.iter()
    }

    pub fn gas(&self, function: Function, items: u64) -> Option<u64> {
        self.entry(function).map(|e| e.gas(items))
    }

    pub fn gas_price_wei(&self) -> Wei {
        self.rates.gas_price_wei()
    }

    pub fn cost_wei(&self, gas: u64) -> Wei {
        gas as Wei * self.gas_price_wei()
    }

    pub fn metered_usd(&self, gas: u64) -> f64 {
        gas as f64 * self.rates.usd_per_gas()
    }

    /// USD cost of one call under the schedule's pricing.
    pub fn cost_usd(&self, function: Function, items: u64) -> Option<f64> {
        let entry = self.entry(function)?;
        let metered = self.metered_usd(entry.gas(items));
        Some(match (self.pricing, entry.quote) {
            (UsdPricing::Quoted, Some(q)) => {
                let scale = self.rates.usd_per_gas() / Rates::default().usd_per_gas();
                let per_item = match entry.items {
                    ItemCount::Constant => 0.0,
                    _ => q.per_item * items as f64,
                };
                (q.base + per_item) * scale
            }
            _ => metered,
        })
    }
}
