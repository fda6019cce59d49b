//! The agency contract as an explicit state machine.
//!
//! One instance runs in a single protocol mode. In strawman mode every entry
//! and vote is submitted on-chain and the client computes the verdict
//! on-chain. In NF-Crowd mode records are aggregated off-chain under Merkle
//! roots, the verdict is posted optimistically, and the audit epochs accept
//! double-vote fraud proofs, chunk reloads and an on-chain recomputation.

mod call;
mod contest;
mod dump;
mod objects;
mod phase;

pub use call::{selector, AgencyCall, ContestId};
pub use contest::{argmax_winners, Contest, TallyEntry, VoteSource};
pub use dump::ContestDump;
pub use objects::{Chunk, ChunkError, EntryObject, Record, VoteObject, EO_SIZE, VO_SIZE};
pub use phase::{Deadlines, Phase};

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::crypto::merkle_verify;
use crate::ledger::{Address, CallEnv, Contract, Function, LedgerError, Meter, Mode, Wei};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AgencyError {
    #[error("not supported by the {0} contract")]
    UnsupportedInMode(&'static str),
    #[error("already a member")]
    AlreadyMember,
    #[error("zero deposit")]
    ZeroDeposit,
    #[error("not member")]
    NotMember,
    #[error("bad deadlines")]
    BadDeadlines,
    #[error("insufficient value attached")]
    InsufficientValue,
    #[error("unexpected value attached")]
    UnexpectedValue,
    #[error("unknown contest")]
    UnknownContest,
    #[error("deadline")]
    DeadlinePassed,
    #[error("wrong phase: {actual}, expected {expected}")]
    WrongPhase { expected: Phase, actual: Phase },
    #[error("bad signature")]
    BadSignature,
    #[error("duplicate entry")]
    Duplicate,
    #[error("caller is not the client")]
    NotClient,
    #[error("client cannot review its own contest")]
    ClientCannotReview,
    #[error("root already set")]
    AlreadySet,
    #[error("already voted on-chain")]
    AlreadyVotedOnChain,
    #[error("already submitted")]
    AlreadySubmitted,
    #[error("bad merkle proof")]
    BadProof,
    #[error("record index out of range")]
    IndexOutOfRange,
    #[error("malformed chunk")]
    MalformedChunk,
    #[error("chunk already reloaded")]
    ChunkAlreadyReloaded,
    #[error("not finalized")]
    NotFinalized,
    #[error("already finalized")]
    AlreadyFinalized,
    #[error("not eligible")]
    NotEligible,
    #[error("already withdrawn")]
    AlreadyWithdrawn,
    #[error("contract balance insufficient for payout")]
    Insolvent,
}

/// Which designers a verdict may elect.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VoteScope {
    /// Only designers with a known entry. The NF-Crowd contract cannot see
    /// entries committed under the EO root, so it treats any voted designer
    /// as a provable entrant.
    #[default]
    EntriesOnly,
    AnyAddress,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgencyConfig {
    pub vote_scope: VoteScope,
    /// Share of the remaining client deposit paid to a successful verdict challenger.
    pub verdict_award_bps: u32,
    pub allow_client_review: bool,
    pub min_client_deposit: Wei,
}

impl Default for AgencyConfig {
    fn default() -> Self {
        AgencyConfig {
            vote_scope: VoteScope::EntriesOnly,
            verdict_award_bps: 5_000,
            allow_client_review: false,
            min_client_deposit: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Member {
    pub deposit: Wei,
    pub dishonest: bool,
    pub withdrawn: bool,
}

impl Member {
    fn active(&self) -> bool {
        !self.dishonest && !self.withdrawn
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Agency {
    address: Address,
    mode: Mode,
    config: AgencyConfig,
    members: BTreeMap<Address, Member>,
    contests: BTreeMap<ContestId, Contest>,
    counters: BTreeMap<Address, u64>,
}

type Result<T> = core::result::Result<T, AgencyError>;

impl Agency {
    pub fn new(address: Address, mode: Mode, config: AgencyConfig) -> Self {
        Agency {
            address,
            mode,
            config,
            members: BTreeMap::new(),
            contests: BTreeMap::new(),
            counters: BTreeMap::new(),
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn config(&self) -> &AgencyConfig {
        &self.config
    }

    pub fn contest(&self, id: &ContestId) -> Option<&Contest> {
        self.contests.get(id)
    }

    pub fn contests(&self) -> impl Iterator<Item = &Contest> {
        self.contests.values()
    }

    pub fn latest_contest(&self, client: &Address) -> Option<ContestId> {
        self.counters.get(client).map(|cn| ContestId { client: *client, cn: *cn })
    }

    pub fn member(&self, addr: &Address) -> Option<&Member> {
        self.members.get(addr)
    }

    pub fn is_member(&self, addr: &Address) -> bool {
        self.members.get(addr).is_some_and(Member::active)
    }

    /// Total the contract owes; equals its ledger balance.
    pub fn liabilities(&self) -> Wei {
        let deposits: Wei = self.members.values().filter(|m| m.active()).map(|m| m.deposit).sum();
        deposits + self.contests.values().map(Contest::escrowed).sum::<Wei>()
    }

    /// Designers a verdict over `contest` considers.
    pub fn candidates(&self, contest: &Contest) -> BTreeSet<Address> {
        let mut set = contest.entrants();
        let include_voted = match self.mode {
            Mode::NfCrowd => true,
            Mode::Strawman => self.config.vote_scope == VoteScope::AnyAddress,
        };
        if include_voted {
            set.extend(contest.verdict_inputs().map(|(_, e)| e.designer));
        }
        set
    }

    /// Winners an on-chain verdict would elect now.
    pub fn tally(&self, contest: &Contest) -> Vec<Address> {
        debug_assert!(
            contest.verdict_inputs().all(|(_, e)| e.source.function().step_type()
                == crate::ledger::StepType::NByOne),
            "verdict inputs must come from n×1 aggregation steps"
        );
        argmax_winners(&contest.merged_counts(), &self.candidates(contest))
    }

    fn contest_mut(&mut self, id: &ContestId) -> Result<&mut Contest> {
        self.contests.get_mut(id).ok_or(AgencyError::UnknownContest)
    }

    fn require_mode(&self, mode: Mode) -> Result<()> {
        if self.mode != mode {
            return Err(AgencyError::UnsupportedInMode(self.mode.name()));
        }
        Ok(())
    }

    fn dispatch(&mut self, env: &mut CallEnv, call: AgencyCall) -> Result<()> {
        let payable = matches!(call, AgencyCall::JoinCommunity | AgencyCall::NewContest { .. });
        if !payable && env.value > 0 {
            return Err(AgencyError::UnexpectedValue);
        }
        match call {
            AgencyCall::JoinCommunity => self.join_community(env),
            AgencyCall::NewContest { deadlines, description, reward, deposit } => {
                self.new_contest(env, deadlines, description, reward, deposit)
            }
            AgencyCall::SubmitEo { contest, eo } => self.submit_eo(env, &contest, &eo),
            AgencyCall::RootEo { contest, root } => self.set_root(env, &contest, root, Phase::Entry),
            AgencyCall::RootVo { contest, root } => self.set_root(env, &contest, root, Phase::ReviewVoting),
            AgencyCall::SubmitVo { contest, vo } => self.submit_vo(env, &contest, &vo),
            AgencyCall::Verdict { contest } => self.verdict(env, &contest),
            AgencyCall::OffChainVerdict { contest, winners } => self.off_chain_verdict(env, &contest, winners),
            AgencyCall::DoubleVotes { contest, proof, chunk, index } => {
                self.double_votes(env, &contest, &proof, &chunk, index as usize)
            }
            AgencyCall::ReloadChunkVo { contest, proof, chunk } => self.reload_chunk_vo(env, &contest, &proof, &chunk),
            AgencyCall::OnchainVerdict { contest } => self.onchain_verdict(env, &contest),
            AgencyCall::Finalize { contest } => self.finalize(env, &contest),
            AgencyCall::WithdrawReward { contest } => self.withdraw_reward(env, &contest),
            AgencyCall::WithdrawAward { contest } => self.withdraw_award(env, &contest),
            AgencyCall::WithdrawDeposit => self.withdraw_deposit(env),
        }
    }

    fn join_community(&mut self, env: &CallEnv) -> Result<()> {
        self.require_mode(Mode::NfCrowd)?;
        if env.value == 0 {
            return Err(AgencyError::ZeroDeposit);
        }
        if self.members.contains_key(&env.caller) {
            return Err(AgencyError::AlreadyMember);
        }
        self.members.insert(env.caller, Member { deposit: env.value, dishonest: false, withdrawn: false });
        Ok(())
    }

    fn new_contest(
        &mut self,
        env: &CallEnv,
        deadlines: Deadlines,
        description: crate::crypto::ContentLink,
        reward: Wei,
        deposit: Wei,
    ) -> Result<()> {
        if !deadlines.is_valid_at(env.now) {
            return Err(AgencyError::BadDeadlines);
        }
        if self.mode == Mode::Strawman && deposit != 0 {
            return Err(AgencyError::UnsupportedInMode(self.mode.name()));
        }
        if self.mode == Mode::NfCrowd && deposit < self.config.min_client_deposit {
            return Err(AgencyError::InsufficientValue);
        }
        let required = reward.checked_add(deposit).ok_or(AgencyError::InsufficientValue)?;
        if env.value < required {
            return Err(AgencyError::InsufficientValue);
        }
        if env.value > required {
            return Err(AgencyError::UnexpectedValue);
        }
        let cn = self.counters.get(&env.caller).copied().unwrap_or(0) + 1;
        self.counters.insert(env.caller, cn);
        let id = ContestId { client: env.caller, cn };
        self.contests
            .insert(id, Contest::new(id, self.mode, env.now, deadlines, description, reward, deposit));
        Ok(())
    }

    fn in_phase(contest: &Contest, now: u64, expected: Phase) -> Result<()> {
        let actual = contest.phase(now);
        if actual != expected {
            return Err(AgencyError::WrongPhase { expected, actual });
        }
        Ok(())
    }

    /// Half the caller's fee, paid from the client deposit while it lasts.
    fn refund_half_fee(env: &mut CallEnv, contest: &mut Contest) -> Result<()> {
        let refund = (env.gas_fee / 2).min(contest.client_deposit_remaining);
        env.pay(env.caller, refund).map_err(|_| AgencyError::Insolvent)?;
        contest.client_deposit_remaining -= refund;
        contest.refunds_paid += refund;
        Ok(())
    }

    fn submit_eo(&mut self, env: &mut CallEnv, id: &ContestId, eo: &EntryObject) -> Result<()> {
        let mode = self.mode;
        let contest = self.contest_mut(id)?;
        if contest.phase(env.now) != Phase::Entry {
            return Err(AgencyError::DeadlinePassed);
        }
        if eo.signer() != Ok(env.caller) {
            return Err(AgencyError::BadSignature);
        }
        if contest.onchain_eos.iter().any(|(d, _)| *d == env.caller) {
            return Err(AgencyError::Duplicate);
        }
        contest.onchain_eos.push((env.caller, eo.link));
        if mode == Mode::NfCrowd {
            Self::refund_half_fee(env, contest)?;
        }
        Ok(())
    }

    fn set_root(&mut self, env: &CallEnv, id: &ContestId, root: crate::crypto::Hash256, phase: Phase) -> Result<()> {
        self.require_mode(Mode::NfCrowd)?;
        let contest = self.contest_mut(id)?;
        if contest.id.client != env.caller {
            return Err(AgencyError::NotClient);
        }
        Self::in_phase(contest, env.now, phase)?;
        let slot = if phase == Phase::Entry { &mut contest.root_eo } else { &mut contest.root_vo };
        if slot.is_some() {
            return Err(AgencyError::AlreadySet);
        }
        *slot = Some(root);
        Ok(())
    }

    fn submit_vo(&mut self, env: &mut CallEnv, id: &ContestId, vo: &VoteObject) -> Result<()> {
        let mode = self.mode;
        let allow_client = self.config.allow_client_review;
        let is_member = self.is_member(&env.caller);
        let contest = self.contest_mut(id)?;
        Self::in_phase(contest, env.now, Phase::ReviewVoting)?;
        if mode == Mode::NfCrowd && !is_member {
            return Err(AgencyError::NotMember);
        }
        if !allow_client && contest.id.client == env.caller {
            return Err(AgencyError::ClientCannotReview);
        }
        if vo.signer() != Ok(env.caller) {
            return Err(AgencyError::BadSignature);
        }
        if !contest.voted_on_chain.insert(env.caller) {
            return Err(AgencyError::AlreadyVotedOnChain);
        }
        contest
            .onchain_votes
            .insert(env.caller, TallyEntry { designer: vo.designer, source: VoteSource::SubmitVo });
        if mode == Mode::NfCrowd {
            Self::refund_half_fee(env, contest)?;
        }
        Ok(())
    }

    fn verdict(&mut self, env: &CallEnv, id: &ContestId) -> Result<()> {
        self.require_mode(Mode::Strawman)?;
        let contest = self.contests.get(id).ok_or(AgencyError::UnknownContest)?;
        if contest.id.client != env.caller {
            return Err(AgencyError::NotClient);
        }
        Self::in_phase(contest, env.now, Phase::ReviewVerdict)?;
        if contest.onchain_winners.is_some() {
            return Err(AgencyError::AlreadySubmitted);
        }
        let winners = self.tally(contest);
        let contest = self.contest_mut(id)?;
        contest.onchain_winners = Some(winners.clone());
        contest.final_winners = Some(winners);
        Ok(())
    }

    fn off_chain_verdict(&mut self, env: &CallEnv, id: &ContestId, winners: Vec<Address>) -> Result<()> {
        self.require_mode(Mode::NfCrowd)?;
        let contest = self.contest_mut(id)?;
        if contest.id.client != env.caller {
            return Err(AgencyError::NotClient);
        }
        Self::in_phase(contest, env.now, Phase::ReviewVerdict)?;
        if contest.offchain_winners.is_some() {
            return Err(AgencyError::AlreadySubmitted);
        }
        contest.offchain_winners = Some(winners.clone());
        if contest.onchain_winners.is_none() {
            contest.final_winners = Some(winners);
        }
        Ok(())
    }

    fn proven_chunk(contest: &Contest, proof: &crate::crypto::MerkleProof, chunk: &Chunk) -> Result<usize> {
        let count = chunk.record_count::<VoteObject>().map_err(|_| AgencyError::MalformedChunk)?;
        let root = contest.root_vo.ok_or(AgencyError::BadProof)?;
        if !merkle_verify(&root, &chunk.digest(), proof) {
            return Err(AgencyError::BadProof);
        }
        Ok(count)
    }

    fn double_votes(
        &mut self,
        env: &mut CallEnv,
        id: &ContestId,
        proof: &crate::crypto::MerkleProof,
        chunk: &Chunk,
        index: usize,
    ) -> Result<()> {
        self.require_mode(Mode::NfCrowd)?;
        let contest = self.contests.get(id).ok_or(AgencyError::UnknownContest)?;
        Self::in_phase(contest, env.now, Phase::AuditDoubleVotes)?;
        let count = Self::proven_chunk(contest, proof, chunk)?;
        if index >= count {
            return Err(AgencyError::IndexOutOfRange);
        }
        let vo: VoteObject = chunk.split(index).map_err(|_| AgencyError::IndexOutOfRange)?;
        let reviewer = vo.signer().map_err(|_| AgencyError::BadSignature)?;
        if !contest.voted_on_chain.contains(&reviewer) || contest.dishonest.contains(&reviewer) {
            return Ok(());
        }
        let confiscated = match self.members.get_mut(&reviewer) {
            Some(m) if !m.dishonest => {
                m.dishonest = true;
                core::mem::take(&mut m.deposit)
            }
            _ => 0,
        };
        let contest = self.contest_mut(id)?;
        contest.dishonest.insert(reviewer);
        contest.onchain_votes.remove(&reviewer);
        contest.confiscated += confiscated;
        *contest.awards.entry(env.caller).or_insert(0) += confiscated;
        Ok(())
    }

    fn reload_chunk_vo(
        &mut self,
        env: &mut CallEnv,
        id: &ContestId,
        proof: &crate::crypto::MerkleProof,
        chunk: &Chunk,
    ) -> Result<()> {
        self.require_mode(Mode::NfCrowd)?;
        let allow_client = self.config.allow_client_review;
        let contest = self.contests.get(id).ok_or(AgencyError::UnknownContest)?;
        Self::in_phase(contest, env.now, Phase::AuditReload)?;
        chunk.record_count::<VoteObject>().map_err(|_| AgencyError::MalformedChunk)?;
        let digest = chunk.digest();
        if contest.reloaded_chunks.contains(&digest) {
            return Err(AgencyError::ChunkAlreadyReloaded);
        }
        Self::proven_chunk(contest, proof, chunk)?;
        let mut reloaded = Vec::new();
        for vo in chunk.records::<VoteObject>().map_err(|_| AgencyError::MalformedChunk)? {
            let Ok(reviewer) = vo.signer() else { continue };
            let skip = contest.dishonest.contains(&reviewer)
                || contest.reloaded_votes.contains_key(&reviewer)
                || contest.voted_on_chain.contains(&reviewer)
                || !self.is_member(&reviewer)
                || (!allow_client && reviewer == contest.id.client)
                || reloaded.iter().any(|(r, _)| *r == reviewer);
            if !skip {
                reloaded.push((reviewer, vo.designer));
            }
        }
        let contest = self.contest_mut(id)?;
        contest.reloaded_chunks.insert(digest);
        for (reviewer, designer) in reloaded {
            contest
                .reloaded_votes
                .insert(reviewer, TallyEntry { designer, source: VoteSource::ReloadChunkVo });
        }
        Ok(())
    }

    fn onchain_verdict(&mut self, env: &mut CallEnv, id: &ContestId) -> Result<()> {
        self.require_mode(Mode::NfCrowd)?;
        let bps = self.config.verdict_award_bps as Wei;
        let contest = self.contests.get(id).ok_or(AgencyError::UnknownContest)?;
        Self::in_phase(contest, env.now, Phase::AuditReload)?;
        if contest.onchain_winners.is_some() {
            return Err(AgencyError::AlreadySubmitted);
        }
        let winners = self.tally(contest);
        let contest = self.contest_mut(id)?;
        let overturned = match &contest.offchain_winners {
            None => true,
            Some(off) => {
                let a: BTreeSet<&Address> = off.iter().collect();
                let b: BTreeSet<&Address> = winners.iter().collect();
                a != b
            }
        };
        if overturned {
            let award = contest.client_deposit_remaining * bps / 10_000;
            contest.client_deposit_remaining -= award;
            contest.client_penalty += award;
            *contest.awards.entry(env.caller).or_insert(0) += award;
        }
        contest.onchain_winners = Some(winners.clone());
        contest.final_winners = Some(winners);
        Ok(())
    }

    fn finalize(&mut self, env: &mut CallEnv, id: &ContestId) -> Result<()> {
        let contest = self.contest_mut(id)?;
        if contest.finalized {
            return Err(AgencyError::AlreadyFinalized);
        }
        if env.now < contest.settlement_time() {
            return Err(AgencyError::WrongPhase { expected: Phase::Finalized, actual: contest.phase(env.now) });
        }
        let winners: Option<BTreeSet<Address>> = contest
            .onchain_winners
            .as_ref()
            .or(contest.offchain_winners.as_ref())
            .map(|w| w.iter().copied().collect());
        let mut to_client = contest.client_deposit_remaining;
        match winners {
            None => {
                contest.aborted = true;
                contest.final_winners = None;
                to_client += contest.reward;
            }
            Some(w) if w.is_empty() => {
                contest.final_winners = Some(Vec::new());
                to_client += contest.reward;
            }
            Some(w) => {
                let share = contest.reward / w.len() as Wei;
                to_client += contest.reward - share * w.len() as Wei;
                for winner in &w {
                    contest.reward_shares.insert(*winner, share);
                }
                contest.final_winners = Some(w.into_iter().collect());
            }
        }
        contest.residual_to_client = to_client;
        contest.client_deposit_remaining = 0;
        contest.finalized = true;
        let client = contest.id.client;
        env.pay(client, to_client).map_err(|_| AgencyError::Insolvent)
    }

    fn withdraw_reward(&mut self, env: &mut CallEnv, id: &ContestId) -> Result<()> {
        let contest = self.contest_mut(id)?;
        if !contest.finalized {
            return Err(AgencyError::NotFinalized);
        }
        let share = *contest.reward_shares.get(&env.caller).ok_or(AgencyError::NotEligible)?;
        if !contest.rewards_withdrawn.insert(env.caller) {
            return Err(AgencyError::AlreadyWithdrawn);
        }
        env.pay(env.caller, share).map_err(|_| AgencyError::Insolvent)
    }

    fn withdraw_award(&mut self, env: &mut CallEnv, id: &ContestId) -> Result<()> {
        self.require_mode(Mode::NfCrowd)?;
        let contest = self.contest_mut(id)?;
        if !contest.finalized {
            return Err(AgencyError::NotFinalized);
        }
        let award = *contest.awards.get(&env.caller).ok_or(AgencyError::NotEligible)?;
        if !contest.awards_withdrawn.insert(env.caller) {
            return Err(AgencyError::AlreadyWithdrawn);
        }
        env.pay(env.caller, award).map_err(|_| AgencyError::Insolvent)
    }

    fn withdraw_deposit(&mut self, env: &mut CallEnv) -> Result<()> {
        self.require_mode(Mode::NfCrowd)?;
        let pending = self.contests.values().any(|c| !c.finalized);
        let member = self.members.get_mut(&env.caller).ok_or(AgencyError::NotEligible)?;
        if member.dishonest {
            return Err(AgencyError::NotEligible);
        }
        if member.withdrawn {
            return Err(AgencyError::AlreadyWithdrawn);
        }
        if pending {
            return Err(AgencyError::NotFinalized);
        }
        member.withdrawn = true;
        let amount = member.deposit;
        env.pay(env.caller, amount).map_err(|_| AgencyError::Insolvent)
    }
}

impl Contract for Agency {
    type Error = AgencyError;

    fn address(&self) -> Address {
        self.address
    }

    fn meter(&self, caller: &Address, payload: &[u8], now: u64) -> core::result::Result<Meter, LedgerError> {
        let call = AgencyCall::decode(payload)?;
        let function = call.function();
        let contest = call.contest().and_then(|id| self.contests.get(id));
        let items = match (&call, contest) {
            (AgencyCall::Verdict { .. }, Some(c)) | (AgencyCall::OnchainVerdict { .. }, Some(c)) => {
                self.candidates(c).len() as u64
            }
            (AgencyCall::ReloadChunkVo { chunk, .. }, _) => (chunk.0.len() / VO_SIZE) as u64,
            _ => 0,
        };
        let phase = match (function, contest) {
            (Function::JoinCommunity | Function::WithdrawDeposit, _) => "community",
            (_, Some(c)) => c.phase(now).label(),
            _ => Phase::Initial.label(),
        };
        let _ = caller;
        Ok(Meter { function, items, phase })
    }

    fn execute(&mut self, env: &mut CallEnv, payload: &[u8]) -> Result<()> {
        let call = AgencyCall::decode(payload).map_err(|_| AgencyError::MalformedChunk)?;
        self.dispatch(env, call)
    }
}
