use std::fmt::Write;

use nfcrowd_core::agency::{ContestDump, ContestId};
use nfcrowd_core::ledger::Contract;
use nfcrowd_core::offchain::{Crowd, World};

/// Contest state, its phase at the current clock and every participant's
/// balance.
pub fn state_dump(world: &World, crowd: &Crowd, id: &ContestId) -> String {
    let mut out = String::new();
    let Some(c) = world.agency.contest(id) else {
        return format!("unknown contest {}#{}\n", id.client, id.cn);
    };
    let now = world.now();
    writeln!(out, "time {now}  phase {}", c.phase(now).label()).unwrap();
    writeln!(out, "{}", ContestDump(c)).unwrap();
    writeln!(out, "balances:").unwrap();
    writeln!(out, "  agency {}: {}", world.agency.address(), world.ledger.balance(&world.agency.address())).unwrap();
    writeln!(out, "  client {}: {}", crowd.client, world.ledger.balance(&crowd.client)).unwrap();
    for (i, d) in crowd.designers.iter().enumerate() {
        writeln!(out, "  designer[{i}] {d}: {}", world.ledger.balance(d)).unwrap();
    }
    for (i, r) in crowd.reviewers.iter().enumerate() {
        writeln!(out, "  reviewer[{i}] {r}: {}", world.ledger.balance(r)).unwrap();
    }
    out
}
