use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::cost::{cost_bounds, CostBounds};
use super::{HarnessError, ScenarioConfig};
use crate::agency::{Agency, AgencyConfig, Contest};
use crate::crypto::{keccak256, SealingKeyPair, SecretKey};
use crate::ledger::{Address, Function, Ledger, Mode, Wei};
use crate::offchain::{
    local_tally, vote_choice, Behavior, ClientAgent, Crowd, DesignerAgent, LogRecord, MessageBus, ReviewerAgent,
    Simulation, World,
};

/// Spending money every agent starts with, on top of escrowed amounts.
const GAS_BUDGET: Wei = 100 * 1_000_000_000_000_000_000;

/// Where the wei that entered the agency went.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConservationAudit {
    pub escrow_in: Wei,
    pub rewards_paid: Wei,
    pub awards_paid: Wei,
    pub refunds_paid: Wei,
    pub deposits_returned: Wei,
    pub residual_to_client: Wei,
    pub retained: Wei,
    /// Moved from violators' deposits into reporter awards.
    pub confiscated: Wei,
    pub gas_sink: Wei,
    pub ok: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DepositFlows {
    pub client_deposit: Wei,
    pub client_refunds: Wei,
    pub client_penalty: Wei,
    pub client_returned: Wei,
    pub member_deposits: Wei,
    pub member_returned: Wei,
    pub member_confiscated: Wei,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub mode: Mode,
    pub designers: usize,
    pub reviewers: usize,
    pub seed: u64,
    /// Gas and USD of contest calls; registration and settlement excluded.
    pub total_gas: u64,
    pub total_usd: f64,
    pub per_phase_usd: BTreeMap<String, f64>,
    pub per_role_usd: BTreeMap<String, f64>,
    /// Transactions counted in the totals.
    pub tx_count: usize,
    pub other_tx_count: usize,
    pub reverted_tx_count: usize,
    pub onchain_actions: BTreeMap<String, usize>,
    pub final_winners: Option<Vec<Address>>,
    pub oracle_winners: Vec<Address>,
    pub winners_match: bool,
    pub verdict_source: String,
    pub aborted: bool,
    pub violations_expected: usize,
    pub violations_detected: usize,
    pub confiscations: usize,
    pub bounds: CostBounds,
    pub within_bounds: bool,
    pub deposits: DepositFlows,
    pub conservation: ConservationAudit,
    pub deposit_justice_ok: bool,
}

impl ScenarioReport {
    /// Every check embedded in a run.
    pub fn passed(&self) -> bool {
        !self.aborted
            && self.winners_match
            && self.within_bounds
            && self.conservation.ok
            && self.deposit_justice_ok
            && self.violations_detected == self.violations_expected
    }

    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.aborted {
            out.push("aborted");
        }
        if !self.winners_match {
            out.push("winners differ from oracle");
        }
        if !self.within_bounds {
            out.push("cost outside bounds");
        }
        if !self.conservation.ok {
            out.push("conservation");
        }
        if !self.deposit_justice_ok {
            out.push("deposit justice");
        }
        if self.violations_detected != self.violations_expected {
            out.push("violations");
        }
        out
    }
}

/// Everything a run produced.
pub struct ScenarioRun {
    pub report: ScenarioReport,
    pub world: World,
    pub crowd: Crowd,
    pub contest: Option<Contest>,
}

impl ScenarioRun {
    pub fn log(&self) -> &[LogRecord] {
        &self.world.log
    }
}

/// Reports carry USD to four decimals. Costs are never negative.
pub fn round_usd(usd: f64) -> f64 {
    ((usd * 1e4 + 0.5) as u64) as f64 / 1e4
}

fn key(role: &str, seed: u64, i: usize) -> SecretKey {
    SecretKey::derive(format!("{role}/{seed}/{i}").as_bytes())
}

fn sealing_key(seed: u64, i: usize) -> SealingKeyPair {
    SealingKeyPair::from_secret(keccak256(format!("seal/{seed}/{i}").as_bytes()).0)
}

/// Agency contract address.
pub fn agency_address() -> Address {
    let h = keccak256(b"agency");
    Address::from_slice(&h.0[12..]).unwrap()
}

/// Brute-force verdict: every reviewer's choice over the proposals it can
/// read, minus votes of reviewers who double-voted a committed vote.
pub struct Oracle {
    pub entry_set: BTreeSet<Address>,
    pub legal_votes: Vec<(Address, Address)>,
    pub violators: BTreeSet<Address>,
    pub winners: Vec<Address>,
}

pub fn oracle(cfg: &ScenarioConfig, crowd: &Crowd) -> Oracle {
    let entry_set: BTreeSet<Address> = crowd.designers.iter().copied().collect();
    let readable: BTreeSet<Address> = (0..cfg.designers)
        .filter(|i| !cfg.designer_strategy(*i).has(&Behavior::WithholdKey))
        .map(|i| crowd.designers[i])
        .collect();
    let committed_votes = cfg.mode == Mode::NfCrowd && !cfg.client.has(&Behavior::WithholdRoots);
    let excluded = cfg.client.excluded_votes();
    let mut legal_votes = Vec::new();
    let mut violators = BTreeSet::new();
    for i in 0..cfg.reviewers {
        let Some(choice) = vote_choice(crowd.seed, i, &readable) else { continue };
        let r = crowd.reviewers[i];
        let double = committed_votes && !excluded.contains(&i) && cfg.reviewer_strategy(i).has(&Behavior::DoubleVote);
        if double {
            violators.insert(r);
        } else {
            legal_votes.push((r, choice));
        }
    }
    let winners = local_tally(&legal_votes, &BTreeSet::new(), &entry_set);
    Oracle { entry_set, legal_votes, violators, winners }
}

pub fn build_simulation(cfg: &ScenarioConfig) -> Result<Simulation, HarnessError> {
    cfg.validate()?;
    let seed = cfg.seed;
    let client_key = key("client", seed, 0);
    let designer_keys: Vec<SecretKey> = (0..cfg.designers).map(|i| key("designer", seed, i)).collect();
    let reviewer_keys: Vec<SecretKey> = (0..cfg.reviewers).map(|i| key("reviewer", seed, i)).collect();
    let crowd = Crowd {
        client: client_key.address(),
        designers: designer_keys.iter().map(SecretKey::address).collect(),
        reviewers: reviewer_keys.iter().map(SecretKey::address).collect(),
        delta: cfg.delta,
        seed,
    };
    let distinct: BTreeSet<&Address> =
        core::iter::once(&crowd.client).chain(&crowd.designers).chain(&crowd.reviewers).collect();
    if distinct.len() != 1 + cfg.designers + cfg.reviewers {
        return Err(HarnessError::InvariantViolation("agent addresses collide".into()));
    }

    let mut ledger = Ledger::new(cfg.schedule());
    let reward = cfg.reward_wei();
    let deposit = cfg.client_deposit();
    ledger.credit_account(crowd.client, GAS_BUDGET + reward + deposit);
    for a in crowd.designers.iter().chain(&crowd.reviewers) {
        ledger.credit_account(*a, GAS_BUDGET + cfg.member_deposit());
    }
    let agency_cfg = AgencyConfig { vote_scope: cfg.vote_scope, ..AgencyConfig::default() };
    let agency = Agency::new(agency_address(), cfg.mode, agency_cfg);
    let world = World::new(ledger, agency, MessageBus::new(cfg.delta, seed));

    let client = ClientAgent::new(client_key, cfg.client.clone(), reward, deposit, cfg.phase_spacing, cfg.chunk_size);
    let designers = designer_keys
        .into_iter()
        .enumerate()
        .map(|(i, k)| DesignerAgent::new(i, k, sealing_key(seed, i), cfg.designer_strategy(i)))
        .collect();
    let reviewers = reviewer_keys
        .into_iter()
        .enumerate()
        .map(|(i, k)| ReviewerAgent::new(i, k, cfg.reviewer_strategy(i)))
        .collect();
    let mut sim = Simulation { world, crowd, client, designers, reviewers, tick: cfg.tick };
    if cfg.mode == Mode::NfCrowd {
        sim.join_community(cfg.member_deposit());
    }
    Ok(sim)
}

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioReport, HarnessError> {
    run_scenario_full(cfg).map(|r| r.report)
}

pub fn run_scenario_full(cfg: &ScenarioConfig) -> Result<ScenarioRun, HarnessError> {
    let mut sim = build_simulation(cfg)?;
    let id = sim.run().ok_or_else(|| HarnessError::InvariantViolation("contest was never opened".into()))?;
    let Simulation { world, crowd, .. } = sim;
    let contest = world.agency.contest(&id).cloned();
    let report = report(cfg, &world, &crowd, contest.as_ref())?;
    Ok(ScenarioRun { report, world, crowd, contest })
}

fn role_of(crowd: &Crowd, a: &Address) -> &'static str {
    if *a == crowd.client {
        "client"
    } else if crowd.designers.contains(a) {
        "designer"
    } else {
        "reviewer"
    }
}

fn audit(world: &World) -> ConservationAudit {
    let ledger = &world.ledger;
    let agency = agency_address();
    let mut a = ConservationAudit { gas_sink: ledger.gas_sink(), ..Default::default() };
    for t in ledger.transfers() {
        if t.to == agency {
            a.escrow_in += t.amount;
            continue;
        }
        if t.from != agency {
            continue;
        }
        let slot = match ledger.receipts()[t.tx_index].function {
            Function::Finalize => &mut a.residual_to_client,
            Function::WithdrawReward => &mut a.rewards_paid,
            Function::WithdrawAward => &mut a.awards_paid,
            Function::WithdrawDeposit => &mut a.deposits_returned,
            Function::SubmitEo | Function::SubmitVo => &mut a.refunds_paid,
            _ => &mut a.retained,
        };
        *slot += t.amount;
    }
    let misc = a.retained;
    a.retained = ledger.balance(&agency);
    a.confiscated = world.agency.contests().map(|c| c.confiscated).sum();
    let out = a.rewards_paid + a.awards_paid + a.refunds_paid + a.deposits_returned + a.residual_to_client;
    a.ok = misc == 0
        && a.escrow_in == out + a.retained
        && a.retained == world.agency.liabilities()
        && ledger.is_conserved();
    a
}

fn report(
    cfg: &ScenarioConfig,
    world: &World,
    crowd: &Crowd,
    contest: Option<&Contest>,
) -> Result<ScenarioReport, HarnessError> {
    let schedule = world.ledger.schedule();
    let mut total_gas = 0;
    let mut total_usd = 0.0;
    let mut per_phase_usd = BTreeMap::new();
    let mut per_role_usd = BTreeMap::new();
    let mut onchain_actions = BTreeMap::new();
    let (mut tx_count, mut other_tx_count, mut reverted_tx_count) = (0, 0, 0);
    for r in world.ledger.receipts() {
        if !r.succeeded() {
            reverted_tx_count += 1;
        }
        let counted = schedule.entry(r.function).is_some_and(|e| e.contest_cost);
        if !counted {
            other_tx_count += 1;
            continue;
        }
        tx_count += 1;
        total_gas += r.gas_used;
        total_usd += r.cost_usd;
        *per_phase_usd.entry(String::from(r.phase)).or_insert(0.0) += r.cost_usd;
        *per_role_usd.entry(String::from(role_of(crowd, &r.caller))).or_insert(0.0) += r.cost_usd;
        *onchain_actions.entry(String::from(r.function.name())).or_insert(0) += 1;
    }

    let oracle = oracle(cfg, crowd);
    let contest = contest.ok_or_else(|| HarnessError::InvariantViolation("contest missing".into()))?;
    let final_winners = if contest.aborted { None } else { contest.final_winners.clone() };
    let as_set = |v: &[Address]| v.iter().copied().collect::<BTreeSet<_>>();
    let winners_match = final_winners.as_ref().is_some_and(|w| as_set(w) == as_set(&oracle.winners));
    let verdict_source = match (&contest.onchain_winners, &contest.offchain_winners) {
        _ if contest.aborted => "none",
        (Some(_), _) => "onchain",
        (None, Some(_)) => "offchain",
        (None, None) => "none",
    };

    let conservation = audit(world);
    let deposits = deposit_flows(cfg, world, crowd, contest);
    let deposit_justice_ok = deposit_justice(cfg, world, crowd, contest);
    let bounds = cost_bounds(cfg);
    let total_usd = round_usd(total_usd);

    Ok(ScenarioReport {
        mode: cfg.mode,
        designers: cfg.designers,
        reviewers: cfg.reviewers,
        seed: cfg.seed,
        total_gas,
        total_usd,
        per_phase_usd: per_phase_usd.into_iter().map(|(k, v)| (k, round_usd(v))).collect(),
        per_role_usd: per_role_usd.into_iter().map(|(k, v)| (k, round_usd(v))).collect(),
        tx_count,
        other_tx_count,
        reverted_tx_count,
        onchain_actions,
        final_winners,
        oracle_winners: oracle.winners.clone(),
        winners_match,
        verdict_source: verdict_source.into(),
        aborted: contest.aborted || contest.final_winners.is_none(),
        violations_expected: oracle.violators.len(),
        violations_detected: contest.dishonest.len(),
        confiscations: crowd
            .reviewers
            .iter()
            .filter(|r| world.agency.member(r).is_some_and(|m| m.dishonest))
            .count(),
        within_bounds: bounds.contains(total_usd),
        bounds: CostBounds { low: round_usd(bounds.low), high: round_usd(bounds.high) },
        deposits,
        conservation,
        deposit_justice_ok,
    })
}

fn paid_by(world: &World, to: &Address, f: Function) -> Wei {
    let agency = agency_address();
    world
        .ledger
        .transfers()
        .iter()
        .filter(|t| t.from == agency && t.to == *to && world.ledger.receipts()[t.tx_index].function == f)
        .map(|t| t.amount)
        .sum()
}

fn deposit_flows(cfg: &ScenarioConfig, world: &World, crowd: &Crowd, contest: &Contest) -> DepositFlows {
    let member_returned: Wei = crowd.reviewers.iter().map(|r| paid_by(world, r, Function::WithdrawDeposit)).sum();
    let member_deposits = if cfg.mode == Mode::NfCrowd { cfg.member_deposit() * cfg.reviewers as Wei } else { 0 };
    DepositFlows {
        client_deposit: contest.client_deposit,
        client_refunds: contest.refunds_paid,
        client_penalty: contest.client_penalty,
        client_returned: contest.client_deposit - contest.refunds_paid - contest.client_penalty,
        member_deposits,
        member_returned,
        member_confiscated: contest.confiscated,
    }
}

/// Only double voters may lose a member deposit, and only a deviating
/// client may lose more than refunds.
fn deposit_justice(cfg: &ScenarioConfig, world: &World, crowd: &Crowd, contest: &Contest) -> bool {
    if contest.client_penalty > 0 && cfg.client.is_honest() {
        return false;
    }
    if cfg.mode == Mode::Strawman {
        return true;
    }
    crowd.reviewers.iter().enumerate().all(|(i, r)| {
        let flagged = cfg.reviewer_strategy(i).has(&Behavior::DoubleVote);
        let returned = paid_by(world, r, Function::WithdrawDeposit);
        let lost = returned < cfg.member_deposit();
        let marked = contest.dishonest.contains(r);
        (!lost || flagged) && (!marked || flagged)
    })
}
