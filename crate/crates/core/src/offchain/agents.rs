use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use super::batch::{root_of, AggregationBatch};
use super::bus::{Cursor, MessageBus, Topic};
use super::strategy::{Behavior, Strategy};
use super::{local_tally, vote_choice};
use crate::agency::{
    argmax_winners, Agency, AgencyCall, Chunk, ContestId, Deadlines, EntryObject, Phase, Record, VoteObject,
    EO_SIZE, VO_SIZE,
};
use crate::crypto::{
    merkle_prove, open_seal, seal, ContentLink, ContentStore, Hash256, SealedBlob, SealingKeyPair, SecretKey,
};
use crate::ledger::{Address, Ledger, Mode, Wei};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AgentId {
    Client,
    Designer(usize),
    Reviewer(usize),
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AgentId::Client => f.write_str("client"),
            AgentId::Designer(i) => write!(f, "designer[{i}]"),
            AgentId::Reviewer(i) => write!(f, "reviewer[{i}]"),
        }
    }
}

/// One agent decision.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogRecord {
    pub at: u64,
    pub agent: AgentId,
    pub phase: String,
    pub action: String,
    pub reason: String,
}

/// Public facts every agent knows about the crowd.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Crowd {
    pub client: Address,
    pub designers: Vec<Address>,
    pub reviewers: Vec<Address>,
    pub delta: u64,
    pub seed: u64,
}

/// Shared environment: the ledger with the agency contract, the bus and
/// the content store.
#[derive(Debug, Clone)]
pub struct World {
    pub ledger: Ledger,
    pub agency: Agency,
    pub bus: MessageBus,
    pub store: ContentStore,
    pub log: Vec<LogRecord>,
    signers: BTreeMap<Vec<u8>, Option<Address>>,
    opens: BTreeMap<(ContentLink, [u8; 32]), bool>,
    roots: BTreeMap<Vec<u8>, Option<Hash256>>,
}

impl World {
    pub fn new(ledger: Ledger, agency: Agency, bus: MessageBus) -> Self {
        World { ledger, agency, bus, store: ContentStore::new(), log: Vec::new(), signers: BTreeMap::new(), opens: BTreeMap::new(), roots: BTreeMap::new() }
    }

    pub fn now(&self) -> u64 {
        self.ledger.now()
    }

    /// Signer of a record. Recovery is memoized by record bytes.
    pub fn signer<R: Record>(&mut self, record: &R) -> Option<Address> {
        let bytes = record.encode();
        if let Some(s) = self.signers.get(&bytes) {
            return *s;
        }
        let s = record.signer().ok();
        self.signers.insert(bytes, s);
        s
    }

    /// Whether the sealed blob behind `link` opens under `secret`. Memoized.
    pub fn opens(&mut self, link: &ContentLink, secret: &[u8; 32]) -> bool {
        if let Some(ok) = self.opens.get(&(*link, *secret)) {
            return *ok;
        }
        let ok = self
            .store
            .fetch(link)
            .and_then(SealedBlob::from_bytes)
            .and_then(|b| open_seal(secret, &b))
            .is_ok();
        self.opens.insert((*link, *secret), ok);
        ok
    }

    fn phase_label(&self, contest: Option<&ContestId>) -> &'static str {
        contest
            .and_then(|id| self.agency.contest(id))
            .map_or(Phase::Initial.label(), |c| c.phase(self.now()).label())
    }

    pub fn note(&mut self, agent: AgentId, contest: Option<&ContestId>, action: &str, reason: &str) {
        let phase = self.phase_label(contest).into();
        self.log.push(LogRecord { at: self.now(), agent, phase, action: action.into(), reason: reason.into() });
    }

    /// Sends a transaction and logs the outcome; true on success.
    pub fn transact(&mut self, agent: AgentId, sender: Address, value: Wei, call: AgencyCall, reason: &str) -> bool {
        let function = call.function().name();
        let contest = call.contest().copied();
        let phase = self.phase_label(contest.as_ref());
        let outcome = self.ledger.call(&mut self.agency, sender, value, call.encode());
        let (action, reason) = match &outcome {
            Ok(_) => (String::from(function), String::from(reason)),
            Err(e) => (format!("{function} failed"), format!("{reason}: {e}")),
        };
        self.log.push(LogRecord { at: self.now(), agent, phase: phase.into(), action, reason });
        outcome.is_ok()
    }

    fn deadlines(&self, id: &ContestId) -> (u64, [u64; 6], u64) {
        let c = self.agency.contest(id).expect("known contest");
        (c.created_at, c.deadlines.0, c.settlement_time())
    }

    fn finalized(&self, id: &ContestId) -> bool {
        self.agency.contest(id).is_some_and(|c| c.finalized)
    }

    fn publish_chunks(&mut self, chunks: &[Chunk]) -> Vec<u8> {
        let mut payload = Vec::with_capacity(chunks.len() * 32);
        for c in chunks {
            payload.extend_from_slice(&self.store.store(c.as_bytes()).0 .0);
        }
        payload
    }

    /// Chunks behind a list of links, with their Merkle root. Roots are
    /// memoized by payload since the links fix the content.
    fn fetch_chunks(&mut self, payload: &[u8]) -> Option<Fetched> {
        if !payload.len().is_multiple_of(32) {
            return None;
        }
        let chunks: Vec<Chunk> = payload
            .chunks_exact(32)
            .map(|d| {
                let link = ContentLink(Hash256::from_slice(d)?);
                self.store.fetch(&link).ok().map(|b| Chunk(b.to_vec()))
            })
            .collect::<Option<_>>()?;
        let root = *self.roots.entry(payload.to_vec()).or_insert_with(|| root_of(&chunks));
        Some(Fetched { chunks, root })
    }
}

/// Latest moment an agent can wait for published data and still fall
/// back on-chain before `end`.
fn check_time(start: u64, end: u64, delta: u64) -> u64 {
    (start + 2 * delta).max(end.saturating_sub(delta))
}

#[derive(Debug, Clone)]
struct Fetched {
    chunks: Vec<Chunk>,
    root: Option<Hash256>,
}

fn committed(fetched: &Option<Fetched>, root: Option<Hash256>) -> Option<&[Chunk]> {
    let f = fetched.as_ref()?;
    (root.is_some() && f.root == root).then_some(&f.chunks)
}

fn contains_record<R: Record>(chunks: &[Chunk], record: &R) -> bool {
    let bytes = record.encode();
    chunks.iter().any(|c| c.as_bytes().chunks_exact(R::SIZE).any(|r| r == bytes.as_slice()))
}

fn report_double_votes(w: &mut World, agent: AgentId, sender: Address, id: ContestId, chunks: &[Chunk]) {
    for (ci, chunk) in chunks.iter().enumerate() {
        let Ok(records) = chunk.records::<VoteObject>() else { continue };
        for (i, vo) in records.enumerate() {
            let Some(reviewer) = w.signer(&vo) else { continue };
            let c = w.agency.contest(&id).expect("known contest");
            if !c.voted_on_chain.contains(&reviewer) || c.dishonest.contains(&reviewer) {
                continue;
            }
            let proof = merkle_prove(chunks, ci).expect("index in range");
            let call = AgencyCall::DoubleVotes { contest: id, proof, chunk: chunk.clone(), index: i as u32 };
            w.transact(agent, sender, 0, call, "vote committed off-chain and cast on-chain");
        }
    }
}

pub struct ClientAgent {
    pub key: SecretKey,
    pub address: Address,
    pub strategy: Strategy,
    pub reward: Wei,
    pub deposit: Wei,
    pub spacing: u64,
    pub chunk_size: usize,
    contest: Option<ContestId>,
    cursor: Cursor,
    eos: Vec<(Address, EntryObject)>,
    vos: Vec<(Address, VoteObject)>,
    eo_batch: Option<AggregationBatch>,
    vo_batch: Option<AggregationBatch>,
    committed_entries: BTreeSet<Address>,
    committed_votes: Vec<(Address, Address)>,
    verdict_done: bool,
    audit_done: bool,
    finalize_done: bool,
    award_done: bool,
}

impl ClientAgent {
    pub fn new(key: SecretKey, strategy: Strategy, reward: Wei, deposit: Wei, spacing: u64, chunk_size: usize) -> Self {
        ClientAgent {
            address: key.address(),
            key,
            strategy,
            reward,
            deposit,
            spacing,
            chunk_size,
            contest: None,
            cursor: Cursor::default(),
            eos: Vec::new(),
            vos: Vec::new(),
            eo_batch: None,
            vo_batch: None,
            committed_entries: BTreeSet::new(),
            committed_votes: Vec::new(),
            verdict_done: false,
            audit_done: false,
            finalize_done: false,
            award_done: false,
        }
    }

    pub fn contest(&self) -> Option<ContestId> {
        self.contest
    }

    pub fn settled(&self) -> bool {
        self.finalize_done && self.award_done
    }

    pub fn act(&mut self, w: &mut World, crowd: &Crowd) {
        let now = w.now();
        let Some(id) = self.contest else {
            let call = AgencyCall::NewContest {
                deadlines: Deadlines::evenly_spaced(now, self.spacing),
                description: w.store.store(b"contest description"),
                reward: self.reward,
                deposit: self.deposit,
            };
            if w.transact(AgentId::Client, self.address, self.reward + self.deposit, call, "open contest") {
                self.contest = w.agency.latest_contest(&self.address);
            }
            return;
        };
        self.receive(w);
        let nf = w.agency.mode() == Mode::NfCrowd;
        let (created, d, settle) = w.deadlines(&id);
        let delta = crowd.delta;
        let withhold_roots = self.strategy.has(&Behavior::WithholdRoots);

        if nf && self.eo_batch.is_none() && now >= created + delta && now < d[0] {
            let excluded: BTreeSet<Address> =
                self.strategy.excluded_entries().iter().map(|i| crowd.designers[*i]).collect();
            let kept: Vec<(Address, EntryObject)> =
                self.eos.iter().filter(|(a, _)| !excluded.contains(a)).copied().collect();
            let records: Vec<EntryObject> = kept.iter().map(|(_, eo)| *eo).collect();
            let batch = AggregationBatch::new(&records, self.chunk_size);
            if withhold_roots {
                w.note(AgentId::Client, Some(&id), "withhold rootEO", "strategy");
            } else {
                self.committed_entries = kept.iter().map(|(a, _)| *a).collect();
                w.transact(AgentId::Client, self.address, 0, AgencyCall::RootEo { contest: id, root: batch.root }, "commit entries");
                let payload = w.publish_chunks(&batch.chunks);
                w.bus.send(Topic::ENTRY_CHUNKS, self.address, None, payload, now);
            }
            self.eo_batch = Some(batch);
        }

        if nf && self.vo_batch.is_none() && now >= d[1] + delta && now < d[2] {
            let excluded: BTreeSet<Address> =
                self.strategy.excluded_votes().iter().map(|i| crowd.reviewers[*i]).collect();
            let kept: Vec<(Address, VoteObject)> =
                self.vos.iter().filter(|(a, _)| !excluded.contains(a)).copied().collect();
            let records: Vec<VoteObject> = kept.iter().map(|(_, vo)| *vo).collect();
            let batch = AggregationBatch::new(&records, self.chunk_size);
            if withhold_roots {
                w.note(AgentId::Client, Some(&id), "withhold rootVO", "strategy");
            } else {
                self.committed_votes = kept.iter().map(|(r, vo)| (*r, vo.designer)).collect();
                w.transact(AgentId::Client, self.address, 0, AgencyCall::RootVo { contest: id, root: batch.root }, "commit votes");
                let payload = w.publish_chunks(&batch.chunks);
                w.bus.send(Topic::VOTE_CHUNKS, self.address, None, payload, now);
            }
            self.vo_batch = Some(batch);
        }

        if !self.verdict_done && now >= d[2] && now < d[3] {
            self.verdict_done = true;
            if self.strategy.has(&Behavior::WithholdVerdict) {
                w.note(AgentId::Client, Some(&id), "withhold verdict", "strategy");
            } else if !nf {
                w.transact(AgentId::Client, self.address, 0, AgencyCall::Verdict { contest: id }, "tally on-chain votes");
            } else {
                let (winners, entrants) = self.tally(w, &id);
                let (winners, reason) = if self.strategy.has(&Behavior::WrongOffchainWinners) {
                    let right: BTreeSet<Address> = winners.into_iter().collect();
                    let mut wrong: Vec<Address> = entrants.difference(&right).copied().collect();
                    if wrong.is_empty() {
                        wrong.push(self.address);
                    }
                    (wrong, "strategy: wrong winners")
                } else {
                    (winners, "local tally")
                };
                w.transact(AgentId::Client, self.address, 0, AgencyCall::OffChainVerdict { contest: id, winners }, reason);
            }
        }

        if nf && !self.audit_done && now >= d[3] && now < d[4] {
            self.audit_done = true;
            if self.strategy.is_honest() && !withhold_roots {
                if let Some(batch) = self.vo_batch.take() {
                    report_double_votes(w, AgentId::Client, self.address, id, &batch.chunks);
                    self.vo_batch = Some(batch);
                }
            }
        }

        if now >= settle {
            if !self.finalize_done {
                self.finalize_done = true;
                if !w.finalized(&id) {
                    w.transact(AgentId::Client, self.address, 0, AgencyCall::Finalize { contest: id }, "settle contest");
                }
            }
            if !self.award_done && w.finalized(&id) {
                self.award_done = true;
                let c = w.agency.contest(&id).unwrap();
                if c.awards.contains_key(&self.address) && !c.awards_withdrawn.contains(&self.address) {
                    w.transact(AgentId::Client, self.address, 0, AgencyCall::WithdrawAward { contest: id }, "claim award");
                }
            }
        }
    }

    fn receive(&mut self, w: &mut World) {
        let inbox: Vec<(Topic, Vec<u8>)> =
            self.cursor.read(&w.bus, self.address).map(|m| (m.topic, m.payload.clone())).collect();
        for (topic, payload) in inbox {
            if topic == Topic::ENTRY && payload.len() == EO_SIZE {
                let eo = EntryObject::decode(&payload);
                if let Some(d) = w.signer(&eo) {
                    if !self.eos.iter().any(|(a, _)| *a == d) {
                        self.eos.push((d, eo));
                    }
                }
            } else if topic == Topic::VOTE && payload.len() == VO_SIZE {
                let vo = VoteObject::decode(&payload);
                if let Some(r) = w.signer(&vo) {
                    if r != self.address && !self.vos.iter().any(|(a, _)| *a == r) {
                        self.vos.push((r, vo));
                    }
                }
            }
        }
    }

    /// Correct winners and the entrant set, from committed and on-chain records.
    fn tally(&self, w: &World, id: &ContestId) -> (Vec<Address>, BTreeSet<Address>) {
        let c = w.agency.contest(id).unwrap();
        let mut entrants = self.committed_entries.clone();
        entrants.extend(c.entrants());
        let mut dishonest: BTreeSet<Address> = c.dishonest.clone();
        dishonest.extend(self.committed_votes.iter().map(|(r, _)| *r).filter(|r| c.voted_on_chain.contains(r)));
        let mut votes = self.committed_votes.clone();
        votes.extend(c.onchain_votes.iter().map(|(r, e)| (*r, e.designer)));
        (local_tally(&votes, &dishonest, &entrants), entrants)
    }
}

pub struct DesignerAgent {
    pub index: usize,
    pub key: SecretKey,
    pub address: Address,
    pub sealing: SealingKeyPair,
    pub strategy: Strategy,
    contest: Option<ContestId>,
    cursor: Cursor,
    eo: Option<EntryObject>,
    entry_chunks: Option<Fetched>,
    verified: bool,
    revealed: bool,
    settled: bool,
}

impl DesignerAgent {
    pub fn new(index: usize, key: SecretKey, sealing: SealingKeyPair, strategy: Strategy) -> Self {
        DesignerAgent {
            index,
            address: key.address(),
            key,
            sealing,
            strategy,
            contest: None,
            cursor: Cursor::default(),
            eo: None,
            entry_chunks: None,
            verified: false,
            revealed: false,
            settled: false,
        }
    }

    pub fn settled(&self) -> bool {
        self.settled
    }

    pub fn entry(&self) -> Option<&EntryObject> {
        self.eo.as_ref()
    }

    pub fn act(&mut self, w: &mut World, crowd: &Crowd) {
        let Some(id) = self.contest.or_else(|| w.agency.latest_contest(&crowd.client)) else { return };
        self.contest = Some(id);
        let me = AgentId::Designer(self.index);
        let inbox: Vec<Vec<u8>> = self
            .cursor
            .read(&w.bus, self.address)
            .filter(|m| m.topic == Topic::ENTRY_CHUNKS && m.sender == crowd.client)
            .map(|m| m.payload.clone())
            .collect();
        for payload in inbox {
            self.entry_chunks = w.fetch_chunks(&payload);
        }
        let now = w.now();
        let nf = w.agency.mode() == Mode::NfCrowd;
        let (created, d, settle) = w.deadlines(&id);

        if self.eo.is_none() && now < d[0] {
            let proposal = format!("proposal of designer {}", self.index);
            let blob = seal(&self.sealing, proposal.as_bytes());
            let link = w.store.store(&blob.to_bytes());
            let eo = EntryObject::new(&self.key, link);
            self.eo = Some(eo);
            if nf {
                w.bus.send(Topic::ENTRY, self.address, Some(crowd.client), eo.encode(), now);
                w.note(me, Some(&id), "send entry", "to client");
            } else {
                w.transact(me, self.address, 0, AgencyCall::SubmitEo { contest: id, eo }, "submit entry");
            }
        }

        if nf && !self.verified && now >= check_time(created, d[0], crowd.delta) && now < d[0] {
            self.verified = true;
            let eo = self.eo.expect("entry prepared");
            let root = w.agency.contest(&id).unwrap().root_eo;
            let included = committed(&self.entry_chunks, root).is_some_and(|c| contains_record(c, &eo));
            if included {
                w.note(me, Some(&id), "entry verified", "present under rootEO");
            } else {
                w.transact(me, self.address, 0, AgencyCall::SubmitEo { contest: id, eo }, "entry missing from committed tree");
            }
        }

        if !self.revealed && now >= d[0] && now < d[1] {
            self.revealed = true;
            if self.strategy.has(&Behavior::WithholdKey) {
                w.note(me, Some(&id), "withhold key", "strategy");
            } else {
                w.bus.send(Topic::SEALING_KEY, self.address, None, self.sealing.secret.to_vec(), now);
                w.note(me, Some(&id), "reveal key", "review epoch 1");
            }
        }

        if !self.settled && now >= settle && w.finalized(&id) {
            self.settled = true;
            let c = w.agency.contest(&id).unwrap();
            if c.reward_shares.contains_key(&self.address) && !c.rewards_withdrawn.contains(&self.address) {
                w.transact(me, self.address, 0, AgencyCall::WithdrawReward { contest: id }, "claim reward");
            }
        }
    }
}

pub struct ReviewerAgent {
    pub index: usize,
    pub key: SecretKey,
    pub address: Address,
    pub strategy: Strategy,
    contest: Option<ContestId>,
    cursor: Cursor,
    keys: BTreeMap<Address, [u8; 32]>,
    entry_chunks: Option<Fetched>,
    vote_chunks: Option<Fetched>,
    vo: Option<VoteObject>,
    voted: bool,
    verified: bool,
    audit_votes: bool,
    audit_verdict: bool,
    settled: bool,
}

impl ReviewerAgent {
    pub fn new(index: usize, key: SecretKey, strategy: Strategy) -> Self {
        ReviewerAgent {
            index,
            address: key.address(),
            key,
            strategy,
            contest: None,
            cursor: Cursor::default(),
            keys: BTreeMap::new(),
            entry_chunks: None,
            vote_chunks: None,
            vo: None,
            voted: false,
            verified: false,
            audit_votes: false,
            audit_verdict: false,
            settled: false,
        }
    }

    pub fn settled(&self) -> bool {
        self.settled
    }

    /// Opens a designer's sealed proposal with the key it revealed.
    pub fn read(&self, store: &ContentStore, designer: &Address, link: &ContentLink) -> Option<Vec<u8>> {
        let secret = self.keys.get(designer)?;
        let blob = SealedBlob::from_bytes(store.fetch(link).ok()?).ok()?;
        open_seal(secret, &blob).ok()
    }

    pub fn vote(&self) -> Option<&VoteObject> {
        self.vo.as_ref()
    }

    pub fn act(&mut self, w: &mut World, crowd: &Crowd) {
        let Some(id) = self.contest.or_else(|| w.agency.latest_contest(&crowd.client)) else { return };
        self.contest = Some(id);
        let me = AgentId::Reviewer(self.index);
        self.receive(w, crowd);
        let now = w.now();
        let nf = w.agency.mode() == Mode::NfCrowd;
        let (_, d, settle) = w.deadlines(&id);

        if !self.voted && now >= d[1] && now < d[2] {
            self.voted = true;
            let readable = self.readable(w, &id);
            match vote_choice(crowd.seed, self.index, &readable) {
                None => w.note(me, Some(&id), "abstain", "no readable proposal"),
                Some(designer) => {
                    let vo = VoteObject::new(&self.key, designer);
                    self.vo = Some(vo);
                    if nf {
                        w.bus.send(Topic::VOTE, self.address, Some(crowd.client), vo.encode(), now);
                        w.note(me, Some(&id), "send vote", "to client");
                    } else {
                        w.transact(me, self.address, 0, AgencyCall::SubmitVo { contest: id, vo }, "cast vote");
                    }
                }
            }
        }

        let verify_at = check_time(d[1], d[2], crowd.delta);
        if let Some(vo) = self.vo.filter(|_| nf && !self.verified && now >= verify_at && now < d[2]) {
            self.verified = true;
            let root = w.agency.contest(&id).unwrap().root_vo;
            let included = committed(&self.vote_chunks, root).is_some_and(|c| contains_record(c, &vo));
            if self.strategy.has(&Behavior::DoubleVote) {
                w.transact(me, self.address, 0, AgencyCall::SubmitVo { contest: id, vo }, "strategy: double vote");
            } else if included {
                w.note(me, Some(&id), "vote verified", "present under rootVO");
            } else {
                w.transact(me, self.address, 0, AgencyCall::SubmitVo { contest: id, vo }, "vote missing from committed tree");
            }
        }

        let audits = nf && self.strategy.is_honest();
        if audits && !self.audit_votes && now >= d[3] && now < d[4] {
            self.audit_votes = true;
            let root = w.agency.contest(&id).unwrap().root_vo;
            if let Some(chunks) = committed(&self.vote_chunks, root).map(<[Chunk]>::to_vec) {
                report_double_votes(w, me, self.address, id, &chunks);
            }
        }

        if audits && !self.audit_verdict && now >= d[4] && now < d[5] {
            self.audit_verdict = true;
            self.challenge(w, crowd, id);
        }

        if !self.settled && now >= settle && w.finalized(&id) {
            self.settled = true;
            let c = w.agency.contest(&id).unwrap();
            let award = c.awards.contains_key(&self.address) && !c.awards_withdrawn.contains(&self.address);
            if award {
                w.transact(me, self.address, 0, AgencyCall::WithdrawAward { contest: id }, "claim award");
            }
            let pending = w.agency.contests().any(|c| !c.finalized);
            if nf && w.agency.is_member(&self.address) && !pending {
                w.transact(me, self.address, 0, AgencyCall::WithdrawDeposit, "recover deposit");
            }
        }
    }

    fn receive(&mut self, w: &mut World, crowd: &Crowd) {
        let inbox: Vec<(Topic, Address, Vec<u8>)> =
            self.cursor.read(&w.bus, self.address).map(|m| (m.topic, m.sender, m.payload.clone())).collect();
        for (topic, sender, payload) in inbox {
            if topic == Topic::SEALING_KEY && payload.len() == 32 {
                self.keys.insert(sender, payload.try_into().unwrap());
            } else if sender == crowd.client && topic == Topic::ENTRY_CHUNKS {
                self.entry_chunks = w.fetch_chunks(&payload);
            } else if sender == crowd.client && topic == Topic::VOTE_CHUNKS {
                self.vote_chunks = w.fetch_chunks(&payload);
            }
        }
    }

    /// Entrants whose sealed proposal this reviewer can open.
    fn readable(&self, w: &mut World, id: &ContestId) -> BTreeSet<Address> {
        let c = w.agency.contest(id).unwrap();
        let mut entries: Vec<(Address, ContentLink)> = c.onchain_eos.clone();
        if let Some(chunks) = committed(&self.entry_chunks, c.root_eo).map(<[Chunk]>::to_vec) {
            for chunk in &chunks {
                let Ok(records) = chunk.records::<EntryObject>() else { continue };
                for eo in records {
                    if let Some(d) = w.signer(&eo) {
                        entries.push((d, eo.link));
                    }
                }
            }
        }
        entries
            .into_iter()
            .filter(|(d, link)| {
                let Some(secret) = self.keys.get(d) else { return false };
                w.opens(link, secret)
            })
            .map(|(d, _)| d)
            .collect()
    }

    /// Recomputes what an on-chain verdict would elect and forces it when the
    /// posted result is missing or differs.
    fn challenge(&mut self, w: &mut World, crowd: &Crowd, id: ContestId) {
        let me = AgentId::Reviewer(self.index);
        let c = w.agency.contest(&id).unwrap();
        if c.onchain_winners.is_some() {
            return;
        }
        let chunks: Vec<Chunk> = committed(&self.vote_chunks, c.root_vo).map(<[Chunk]>::to_vec).unwrap_or_default();
        let mut reloaded: BTreeMap<Address, Address> = BTreeMap::new();
        for chunk in &chunks {
            let Ok(records) = chunk.records::<VoteObject>() else { continue };
            for vo in records {
                let Some(r) = w.signer(&vo) else { continue };
                let c = w.agency.contest(&id).unwrap();
                let skip = c.dishonest.contains(&r)
                    || c.voted_on_chain.contains(&r)
                    || reloaded.contains_key(&r)
                    || !w.agency.is_member(&r)
                    || r == crowd.client;
                if !skip {
                    reloaded.insert(r, vo.designer);
                }
            }
        }
        let c = w.agency.contest(&id).unwrap();
        let mut counts: BTreeMap<Address, u64> = c.onchain_vote_counts();
        let mut candidates = c.entrants();
        for e in c.onchain_votes.values() {
            candidates.insert(e.designer);
        }
        for d in reloaded.values() {
            *counts.entry(*d).or_insert(0) += 1;
            candidates.insert(*d);
        }
        let expected: BTreeSet<Address> = argmax_winners(&counts, &candidates).into_iter().collect();
        let posted: Option<BTreeSet<Address>> = c.offchain_winners.as_ref().map(|v| v.iter().copied().collect());
        if posted.as_ref() == Some(&expected) {
            w.note(me, Some(&id), "accept verdict", "matches local recomputation");
            return;
        }
        let reason = if posted.is_none() { "no off-chain verdict" } else { "off-chain verdict differs" };
        for (ci, chunk) in chunks.iter().enumerate() {
            if w.agency.contest(&id).unwrap().reloaded_chunks.contains(&chunk.digest()) {
                continue;
            }
            let proof = merkle_prove(&chunks, ci).expect("index in range");
            let call = AgencyCall::ReloadChunkVo { contest: id, proof, chunk: chunk.clone() };
            w.transact(me, self.address, 0, call, reason);
        }
        if w.agency.contest(&id).unwrap().onchain_winners.is_none() {
            w.transact(me, self.address, 0, AgencyCall::OnchainVerdict { contest: id }, reason);
        }
    }
}

/// Agents driven in a fixed order at every tick: client, designers,
/// reviewers.
pub struct Simulation {
    pub world: World,
    pub crowd: Crowd,
    pub client: ClientAgent,
    pub designers: Vec<DesignerAgent>,
    pub reviewers: Vec<ReviewerAgent>,
    pub tick: u64,
}

impl Simulation {
    /// Registers every reviewer as a community member.
    pub fn join_community(&mut self, deposit: Wei) {
        for r in &self.reviewers {
            let call = AgencyCall::JoinCommunity;
            self.world.transact(AgentId::Reviewer(r.index), r.address, deposit, call, "register as reviewer");
        }
    }

    pub fn step(&mut self) {
        let now = self.world.now();
        self.world.bus.deliver(now);
        self.client.act(&mut self.world, &self.crowd);
        for d in &mut self.designers {
            d.act(&mut self.world, &self.crowd);
        }
        for r in &mut self.reviewers {
            r.act(&mut self.world, &self.crowd);
        }
        self.world.ledger.advance_clock(self.tick as i64).expect("forward clock");
    }

    pub fn settled(&self) -> bool {
        self.client.settled()
            && self.designers.iter().all(DesignerAgent::settled)
            && self.reviewers.iter().all(ReviewerAgent::settled)
    }

    /// Runs from contest creation through settlement; `None` if the client
    /// never managed to open a contest.
    pub fn run(&mut self) -> Option<ContestId> {
        self.step();
        let id = self.client.contest()?;
        let settle = self.world.agency.contest(&id).unwrap().settlement_time();
        while !self.settled() && self.world.now() <= settle + 2 * self.tick {
            self.step();
        }
        Some(id)
    }
}
