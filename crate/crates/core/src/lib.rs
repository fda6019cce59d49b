#![no_std]
extern crate alloc;

pub mod agency;
pub mod crypto;
pub mod harness;
pub mod ledger;
pub mod offchain;
