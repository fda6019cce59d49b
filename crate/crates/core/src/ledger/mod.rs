//! Minimal deterministic ledger: balances, a simulated clock and metered
//! execution of contract calls.
//!
//! Transactions run immediately in submission order. Gas is charged up front
//! and kept on revert; the contract state and attached value are rolled back.

mod address;
mod schedule;

pub use address::Address;
pub use schedule::{
    Function, GasEntry, GasSchedule, ItemCount, Mode, Rates, StepType, UsdPricing, UsdQuote,
    DEFAULT_ETHER_TO_USD, DEFAULT_GAS_TO_ETHER, JOIN_COMMUNITY_GAS, SETTLEMENT_GAS, WEI_PER_ETHER,
};

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Wei = u128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SimClock {
    now: u64,
}

impl SimClock {
    pub fn at(now: u64) -> Self {
        SimClock { now }
    }

    pub fn now(&self) -> u64 {
        self.now
    }

    pub fn advance(&mut self, delta: i64) -> Result<u64, LedgerError> {
        if delta < 0 {
            return Err(LedgerError::NegativeDelta);
        }
        self.now += delta as u64;
        Ok(self.now)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transaction {
    pub sender: Address,
    pub recipient: Address,
    pub value: Wei,
    pub payload: Vec<u8>,
    pub nonce: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum TxStatus {
    Success,
    Reverted(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GasReceipt {
    pub tx_index: usize,
    pub function: Function,
    pub items: u64,
    pub caller: Address,
    pub charged_to: Address,
    pub gas_used: u64,
    pub cost_wei: Wei,
    pub cost_usd: f64,
    pub phase: &'static str,
    pub status: TxStatus,
    pub at: u64,
}

/// Value moved by a successful transaction: the attached value into the
/// contract, then every payout out of it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transfer {
    pub tx_index: usize,
    pub from: Address,
    pub to: Address,
    pub amount: Wei,
}

impl GasReceipt {
    pub fn succeeded(&self) -> bool {
        self.status == TxStatus::Success
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LedgerError {
    #[error("unknown sender {0}")]
    UnknownSender(Address),
    #[error("bad nonce: expected {expected}, got {got}")]
    BadNonce { expected: u64, got: u64 },
    #[error("insufficient balance: need {needed} wei, have {available}")]
    InsufficientBalance { needed: Wei, available: Wei },
    #[error("clock cannot move backwards")]
    NegativeDelta,
    #[error("recipient {0} is not the contract")]
    WrongRecipient(Address),
    #[error("function {0} is not in the gas schedule")]
    UnknownFunction(&'static str),
    #[error("undecodable call payload")]
    MalformedPayload,
}

/// A rejected transaction leaves no trace; a reverted one is charged gas.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TxError<E> {
    #[error(transparent)]
    Ledger(LedgerError),
    #[error("reverted: {reason}")]
    HandlerRevert { reason: E, receipt: Box<GasReceipt> },
}

impl<E> From<LedgerError> for TxError<E> {
    fn from(e: LedgerError) -> Self {
        TxError::Ledger(e)
    }
}

impl<E> TxError<E> {
    pub fn revert_reason(&self) -> Option<&E> {
        match self {
            TxError::HandlerRevert { reason, .. } => Some(reason),
            TxError::Ledger(_) => None,
        }
    }
}

/// Gas metering information the contract derives before executing a call.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Meter {
    pub function: Function,
    pub items: u64,
    pub phase: &'static str,
}

/// Execution context handed to a contract call.
#[derive(Debug)]
pub struct CallEnv {
    pub caller: Address,
    pub value: Wei,
    pub now: u64,
    pub gas_fee: Wei,
    available: Wei,
    payouts: Vec<(Address, Wei)>,
}

impl CallEnv {
    /// Schedules a transfer out of the contract account, applied if the call succeeds.
    pub fn pay(&mut self, to: Address, amount: Wei) -> Result<(), Wei> {
        if amount > self.available {
            return Err(self.available);
        }
        self.available -= amount;
        if amount > 0 {
            self.payouts.push((to, amount));
        }
        Ok(())
    }

    pub fn payouts(&self) -> &[(Address, Wei)] {
        &self.payouts
    }
}

pub trait Contract: Clone {
    type Error: fmt::Display + fmt::Debug + Clone;

    fn address(&self) -> Address;
    fn meter(&self, caller: &Address, payload: &[u8], now: u64) -> Result<Meter, LedgerError>;
    fn execute(&mut self, env: &mut CallEnv, payload: &[u8]) -> Result<(), Self::Error>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Account {
    pub balance: Wei,
    pub nonce: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ledger {
    clock: SimClock,
    accounts: BTreeMap<Address, Account>,
    schedule: GasSchedule,
    transactions: Vec<Transaction>,
    receipts: Vec<GasReceipt>,
    transfers: Vec<Transfer>,
    gas_sink: Wei,
    minted: Wei,
}

impl Ledger {
    pub fn new(schedule: GasSchedule) -> Self {
        Ledger {
            clock: SimClock::default(),
            accounts: BTreeMap::new(),
            schedule,
            transactions: Vec::new(),
            receipts: Vec::new(),
            transfers: Vec::new(),
            gas_sink: 0,
            minted: 0,
        }
    }

    pub fn now(&self) -> u64 {
        self.clock.now()
    }

    pub fn advance_clock(&mut self, delta: i64) -> Result<u64, LedgerError> {
        self.clock.advance(delta)
    }

    pub fn schedule(&self) -> &GasSchedule {
        &self.schedule
    }

    pub fn credit_account(&mut self, addr: Address, amount: Wei) {
        self.accounts.entry(addr).or_default().balance += amount;
        self.minted += amount;
    }

    pub fn balance(&self, addr: &Address) -> Wei {
        self.accounts.get(addr).map_or(0, |a| a.balance)
    }

    pub fn account(&self, addr: &Address) -> Option<&Account> {
        self.accounts.get(addr)
    }

    pub fn next_nonce(&self, addr: &Address) -> u64 {
        self.accounts.get(addr).map_or(0, |a| a.nonce)
    }

    pub fn receipts(&self) -> &[GasReceipt] {
        &self.receipts
    }

    pub fn transactions(&self) -> &[Transaction] {
        &self.transactions
    }

    pub fn transfers(&self) -> &[Transfer] {
        &self.transfers
    }

    pub fn gas_sink(&self) -> Wei {
        self.gas_sink
    }

    pub fn total_minted(&self) -> Wei {
        self.minted
    }

    pub fn total_balances(&self) -> Wei {
        self.accounts.values().map(|a| a.balance).sum()
    }

    /// Balances plus burned gas always equal the funds ever credited.
    pub fn is_conserved(&self) -> bool {
        self.total_balances() + self.gas_sink == self.minted
    }

    /// Builds and executes a call from `sender` using its next nonce.
    pub fn call<C: Contract>(
        &mut self,
        contract: &mut C,
        sender: Address,
        value: Wei,
        payload: Vec<u8>,
    ) -> Result<GasReceipt, TxError<C::Error>> {
        let tx = Transaction {
            sender,
            recipient: contract.address(),
            value,
            payload,
            nonce: self.next_nonce(&sender),
        };
        self.execute_transaction(tx, contract)
    }

    pub fn execute_transaction<C: Contract>(
        &mut self,
        tx: Transaction,
        contract: &mut C,
    ) -> Result<GasReceipt, TxError<C::Error>> {
        let now = self.now();
        let sender = *self.accounts.get(&tx.sender).ok_or(LedgerError::UnknownSender(tx.sender))?;
        if tx.nonce != sender.nonce {
            return Err(LedgerError::BadNonce { expected: sender.nonce, got: tx.nonce }.into());
        }
        let target = contract.address();
        if tx.recipient != target {
            return Err(LedgerError::WrongRecipient(tx.recipient).into());
        }
        let meter = contract.meter(&tx.sender, &tx.payload, now)?;
        let gas = self
            .schedule
            .gas(meter.function, meter.items)
            .ok_or(LedgerError::UnknownFunction(meter.function.name()))?;
        let fee = self.schedule.cost_wei(gas);
        let needed = fee + tx.value;
        if sender.balance < needed {
            return Err(LedgerError::InsufficientBalance { needed, available: sender.balance }.into());
        }

        {
            let acct = self.accounts.get_mut(&tx.sender).unwrap();
            acct.balance -= fee;
            acct.nonce += 1;
        }
        self.gas_sink += fee;

        let snapshot = contract.clone();
        self.transfer(&tx.sender, &target, tx.value);
        let mut env = CallEnv {
            caller: tx.sender,
            value: tx.value,
            now,
            gas_fee: fee,
            available: self.balance(&target),
            payouts: Vec::new(),
        };
        let outcome = contract.execute(&mut env, &tx.payload);
        let status = match &outcome {
            Ok(()) => {
                let tx_index = self.transactions.len();
                if tx.value > 0 {
                    self.transfers.push(Transfer { tx_index, from: tx.sender, to: target, amount: tx.value });
                }
                for (to, amount) in env.payouts {
                    self.transfer(&target, &to, amount);
                    self.transfers.push(Transfer { tx_index, from: target, to, amount });
                }
                TxStatus::Success
            }
            Err(e) => {
                *contract = snapshot;
                self.transfer(&target, &tx.sender, tx.value);
                TxStatus::Reverted(e.to_string())
            }
        };

        let receipt = GasReceipt {
            tx_index: self.transactions.len(),
            function: meter.function,
            items: meter.items,
            caller: tx.sender,
            charged_to: tx.sender,
            gas_used: gas,
            cost_wei: fee,
            cost_usd: self.schedule.cost_usd(meter.function, meter.items).unwrap_or(0.0),
            phase: meter.phase,
            status,
            at: now,
        };
        self.transactions.push(tx);
        self.receipts.push(receipt.clone());
        match outcome {
            Ok(()) => Ok(receipt),
            Err(reason) => Err(TxError::HandlerRevert { reason, receipt: Box::new(receipt) }),
        }
    }

    fn transfer(&mut self, from: &Address, to: &Address, amount: Wei) {
        if amount == 0 {
            return;
        }
        let src = self.accounts.get_mut(from).expect("transfer source exists");
        src.balance = src.balance.checked_sub(amount).expect("transfer within balance");
        self.accounts.entry(*to).or_default().balance += amount;
    }
}
