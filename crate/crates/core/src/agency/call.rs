//! Call payloads: a 4-byte selector (leading bytes of the hash of the
//! function name) followed by fixed-width big-endian arguments. Variable
//! length fields carry a u32 length prefix.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::objects::{Chunk, EntryObject, Record, VoteObject};
use super::phase::Deadlines;
use crate::crypto::{keccak256, ContentLink, Hash256, MerkleProof};
use crate::ledger::{Address, Function, LedgerError, Wei};

/// A contest is identified by its client and the client's contest counter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ContestId {
    pub client: Address,
    pub cn: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AgencyCall {
    JoinCommunity,
    NewContest { deadlines: Deadlines, description: ContentLink, reward: Wei, deposit: Wei },
    SubmitEo { contest: ContestId, eo: EntryObject },
    RootEo { contest: ContestId, root: Hash256 },
    RootVo { contest: ContestId, root: Hash256 },
    SubmitVo { contest: ContestId, vo: VoteObject },
    Verdict { contest: ContestId },
    OffChainVerdict { contest: ContestId, winners: Vec<Address> },
    DoubleVotes { contest: ContestId, proof: MerkleProof, chunk: Chunk, index: u32 },
    ReloadChunkVo { contest: ContestId, proof: MerkleProof, chunk: Chunk },
    OnchainVerdict { contest: ContestId },
    Finalize { contest: ContestId },
    WithdrawReward { contest: ContestId },
    WithdrawAward { contest: ContestId },
    WithdrawDeposit,
}

pub fn selector(function: Function) -> [u8; 4] {
    let h = keccak256(function.name().as_bytes());
    [h.0[0], h.0[1], h.0[2], h.0[3]]
}

impl AgencyCall {
    pub fn function(&self) -> Function {
        match self {
            AgencyCall::JoinCommunity => Function::JoinCommunity,
            AgencyCall::NewContest { .. } => Function::NewContest,
            AgencyCall::SubmitEo { .. } => Function::SubmitEo,
            AgencyCall::RootEo { .. } => Function::RootEo,
            AgencyCall::RootVo { .. } => Function::RootVo,
            AgencyCall::SubmitVo { .. } => Function::SubmitVo,
            AgencyCall::Verdict { .. } => Function::Verdict,
            AgencyCall::OffChainVerdict { .. } => Function::OffChainVerdict,
            AgencyCall::DoubleVotes { .. } => Function::DoubleVotes,
            AgencyCall::ReloadChunkVo { .. } => Function::ReloadChunkVo,
            AgencyCall::OnchainVerdict { .. } => Function::OnchainVerdict,
            AgencyCall::Finalize { .. } => Function::Finalize,
            AgencyCall::WithdrawReward { .. } => Function::WithdrawReward,
            AgencyCall::WithdrawAward { .. } => Function::WithdrawAward,
            AgencyCall::WithdrawDeposit => Function::WithdrawDeposit,
        }
    }

    pub fn contest(&self) -> Option<&ContestId> {
        match self {
            AgencyCall::JoinCommunity | AgencyCall::NewContest { .. } | AgencyCall::WithdrawDeposit => None,
            AgencyCall::SubmitEo { contest, .. }
            | AgencyCall::RootEo { contest, .. }
            | AgencyCall::RootVo { contest, .. }
            | AgencyCall::SubmitVo { contest, .. }
            | AgencyCall::Verdict { contest }
            | AgencyCall::OffChainVerdict { contest, .. }
            | AgencyCall::DoubleVotes { contest, .. }
            | AgencyCall::ReloadChunkVo { contest, .. }
            | AgencyCall::OnchainVerdict { contest }
            | AgencyCall::Finalize { contest }
            | AgencyCall::WithdrawReward { contest }
            | AgencyCall::WithdrawAward { contest } => Some(contest),
        }
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut w = Writer(Vec::new());
        w.0.extend_from_slice(&selector(self.function()));
        if let Some(c) = self.contest() {
            w.contest(c);
        }
        match self {
            AgencyCall::NewContest { deadlines, description, reward, deposit } => {
                for d in deadlines.0 {
                    w.u64(d);
                }
                w.hash(&description.0);
                w.u128(*reward);
                w.u128(*deposit);
            }
            AgencyCall::SubmitEo { eo, .. } => eo.encode_into(&mut w.0),
            AgencyCall::SubmitVo { vo, .. } => vo.encode_into(&mut w.0),
            AgencyCall::RootEo { root, .. } | AgencyCall::RootVo { root, .. } => w.hash(root),
            AgencyCall::OffChainVerdict { winners, .. } => {
                w.u32(winners.len() as u32);
                for a in winners {
                    w.0.extend_from_slice(&a.0);
                }
            }
            AgencyCall::DoubleVotes { proof, chunk, index, .. } => {
                w.proof(proof);
                w.bytes(&chunk.0);
                w.u32(*index);
            }
            AgencyCall::ReloadChunkVo { proof, chunk, .. } => {
                w.proof(proof);
                w.bytes(&chunk.0);
            }
            _ => {}
        }
        w.0
    }

    pub fn decode(payload: &[u8]) -> Result<Self, LedgerError> {
        let mut r = Reader(payload);
        let sel = r.take(4)?;
        let function = Function::ALL
            .into_iter()
            .find(|f| selector(*f) == sel)
            .ok_or(LedgerError::MalformedPayload)?;
        let call = match function {
            Function::JoinCommunity => AgencyCall::JoinCommunity,
            Function::WithdrawDeposit => AgencyCall::WithdrawDeposit,
            Function::NewContest => {
                let mut d = [0u64; 6];
                for slot in &mut d {
                    *slot = r.u64()?;
                }
                AgencyCall::NewContest {
                    deadlines: Deadlines(d),
                    description: ContentLink(r.hash()?),
                    reward: r.u128()?,
                    deposit: r.u128()?,
                }
            }
            _ => {
                let contest = r.contest()?;
                match function {
                    Function::SubmitEo => {
                        AgencyCall::SubmitEo { contest, eo: EntryObject::decode(r.take(EntryObject::SIZE)?) }
                    }
                    Function::SubmitVo => {
                        AgencyCall::SubmitVo { contest, vo: VoteObject::decode(r.take(VoteObject::SIZE)?) }
                    }
                    Function::RootEo => AgencyCall::RootEo { contest, root: r.hash()? },
                    Function::RootVo => AgencyCall::RootVo { contest, root: r.hash()? },
                    Function::Verdict => AgencyCall::Verdict { contest },
                    Function::OffChainVerdict => {
                        let n = r.u32()? as usize;
                        let mut winners = Vec::with_capacity(n.min(1024));
                        for _ in 0..n {
                            winners.push(Address::from_slice(r.take(20)?).unwrap());
                        }
                        AgencyCall::OffChainVerdict { contest, winners }
                    }
                    Function::DoubleVotes => AgencyCall::DoubleVotes {
                        contest,
                        proof: r.proof()?,
                        chunk: Chunk(r.bytes()?),
                        index: r.u32()?,
                    },
                    Function::ReloadChunkVo => {
                        AgencyCall::ReloadChunkVo { contest, proof: r.proof()?, chunk: Chunk(r.bytes()?) }
                    }
                    Function::OnchainVerdict => AgencyCall::OnchainVerdict { contest },
                    Function::Finalize => AgencyCall::Finalize { contest },
                    Function::WithdrawReward => AgencyCall::WithdrawReward { contest },
                    Function::WithdrawAward => AgencyCall::WithdrawAward { contest },
                    _ => unreachable!(),
                }
            }
        };
        if !r.0.is_empty() {
            return Err(LedgerError::MalformedPayload);
        }
        Ok(call)
    }
}

struct Writer(Vec<u8>);

impl Writer {
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_be_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_be_bytes());
    }
    fn u128(&mut self, v: u128) {
        self.0.extend_from_slice(&v.to_be_bytes());
    }
    fn hash(&mut self, h: &Hash256) {
        self.0.extend_from_slice(&h.0);
    }
    fn contest(&mut self, c: &ContestId) {
        self.0.extend_from_slice(&c.client.0);
        self.u64(c.cn);
    }
    fn bytes(&mut self, b: &[u8]) {
        self.u32(b.len() as u32);
        self.0.extend_from_slice(b);
    }
    fn proof(&mut self, p: &MerkleProof) {
        self.u32(p.leaf_index as u32);
        self.u32(p.leaf_count as u32);
        self.u32(p.siblings.len() as u32);
        for s in &p.siblings {
            self.hash(s);
        }
    }
}

struct Reader<'a>(&'a [u8]);

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], LedgerError> {
        if self.0.len() < n {
            return Err(LedgerError::MalformedPayload);
        }
        let (head, tail) = self.0.split_at(n);
        self.0 = tail;
        Ok(head)
    }
    fn u32(&mut self) -> Result<u32, LedgerError> {
        Ok(u32::from_be_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64, LedgerError> {
        Ok(u64::from_be_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn u128(&mut self) -> Result<u128, LedgerError> {
        Ok(u128::from_be_bytes(self.take(16)?.try_into().unwrap()))
    }
    fn hash(&mut self) -> Result<Hash256, LedgerError> {
        Ok(Hash256::from_slice(self.take(32)?).unwrap())
    }
    fn contest(&mut self) -> Result<ContestId, LedgerError> {
        let client = Address::from_slice(self.take(20)?).unwrap();
        Ok(ContestId { client, cn: self.u64()? })
    }
    fn bytes(&mut self) -> Result<Vec<u8>, LedgerError> {
        let n = self.u32()? as usize;
        Ok(self.take(n)?.to_vec())
    }
    fn proof(&mut self) -> Result<MerkleProof, LedgerError> {
        let leaf_index = self.u32()? as usize;
        let leaf_count = self.u32()? as usize;
        let n = self.u32()? as usize;
        let mut siblings = Vec::with_capacity(n.min(64));
        for _ in 0..n {
            siblings.push(self.hash()?);
        }
        Ok(MerkleProof { leaf_index, leaf_count, siblings })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crypto::SecretKey;
    use proptest::prelude::*;

    fn addr() -> impl Strategy<Value = Address> {
        any::<[u8; 20]>().prop_map(Address)
    }

    fn contest() -> impl Strategy<Value = ContestId> {
        (addr(), any::<u64>()).prop_map(|(client, cn)| ContestId { client, cn })
    }

    fn call() -> impl Strategy<Value = AgencyCall> {
        let proof = (0usize..1000, 0usize..1000, proptest::collection::vec(any::<[u8; 32]>(), 0..5))
            .prop_map(|(leaf_index, leaf_count, s)| MerkleProof {
                leaf_index,
                leaf_count,
                siblings: s.into_iter().map(Hash256).collect(),
            });
        let bytes = proptest::collection::vec(any::<u8>(), 0..300);
        prop_oneof![
            Just(AgencyCall::JoinCommunity),
            Just(AgencyCall::WithdrawDeposit),
            (any::<[u64; 6]>(), any::<[u8; 32]>(), any::<u128>(), any::<u128>()).prop_map(|(d, h, reward, deposit)| {
                AgencyCall::NewContest { deadlines: Deadlines(d), description: ContentLink(Hash256(h)), reward, deposit }
            }),
            (contest(), any::<[u8; 32]>()).prop_map(|(contest, h)| AgencyCall::RootVo { contest, root: Hash256(h) }),
            (contest(), proptest::collection::vec(addr(), 0..6))
                .prop_map(|(contest, winners)| AgencyCall::OffChainVerdict { contest, winners }),
            (contest(), proof.clone(), bytes.clone(), any::<u32>()).prop_map(|(contest, proof, b, index)| {
                AgencyCall::DoubleVotes { contest, proof, chunk: Chunk(b), index }
            }),
            (contest(), proof, bytes).prop_map(|(contest, proof, b)| AgencyCall::ReloadChunkVo { contest, proof, chunk: Chunk(b) }),
            contest().prop_map(|contest| AgencyCall::OnchainVerdict { contest }),
        ]
    }

    proptest! {
        #[test]
        fn codec_round_trip(c in call()) {
            prop_assert_eq!(AgencyCall::decode(&c.encode()), Ok(c));
        }

        #[test]
        fn truncation_never_decodes_to_same_call(c in call(), cut in 1usize..8) {
            let bytes = c.encode();
            if cut <= bytes.len() {
                let decoded = AgencyCall::decode(&bytes[..bytes.len() - cut]);
                prop_assert!(decoded != Ok(c));
            }
        }
    }

    #[test]
    fn signed_objects_round_trip() {
        let sk = SecretKey::derive(b"k");
        let contest = ContestId { client: Address([1; 20]), cn: 1 };
        let eo = EntryObject::new(&sk, ContentLink::of(b"p"));
        let vo = VoteObject::new(&sk, Address([2; 20]));
        for c in [AgencyCall::SubmitEo { contest, eo }, AgencyCall::SubmitVo { contest, vo }] {
            assert_eq!(AgencyCall::decode(&c.encode()), Ok(c));
        }
        assert_eq!(AgencyCall::decode(&[1, 2]), Err(LedgerError::MalformedPayload));
        assert_eq!(AgencyCall::decode(&[0xde, 0xad, 0xbe, 0xef]), Err(LedgerError::MalformedPayload));
        let mut extra = AgencyCall::JoinCommunity.encode();
        extra.push(0);
        assert_eq!(AgencyCall::decode(&extra), Err(LedgerError::MalformedPayload));
    }

    #[test]
    fn selectors_are_distinct() {
        for a in Function::ALL {
            for b in Function::ALL {
                if a != b {
                    assert_ne!(selector(a), selector(b));
                }
            }
        }
    }
}
