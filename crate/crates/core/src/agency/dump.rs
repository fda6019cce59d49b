use core::fmt;

use super::contest::Contest;
use crate::ledger::Address;

/// Human-readable rendering of a contest's state.
pub struct ContestDump<'a>(pub &'a Contest);

fn list(f: &mut fmt::Formatter<'_>, label: &str, addrs: Option<&[Address]>) -> fmt::Result {
    write!(f, "  {label}:")?;
    match addrs {
        None => writeln!(f, " -"),
        Some([]) => writeln!(f, " []"),
        Some(a) => {
            for x in a {
                write!(f, " {x}")?;
            }
            writeln!(f)
        }
    }
}

impl fmt::Display for ContestDump<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.0;
        writeln!(f, "contest {}#{} ({})", c.id.client, c.id.cn, c.mode.name())?;
        writeln!(f, "  created: {}  deadlines: {:?}", c.created_at, c.deadlines.0)?;
        writeln!(f, "  reward: {}  deposit: {} (remaining {})", c.reward, c.client_deposit, c.client_deposit_remaining)?;
        match c.root_eo {
            Some(r) => writeln!(f, "  rootEO: {r}")?,
            None => writeln!(f, "  rootEO: -")?,
        }
        match c.root_vo {
            Some(r) => writeln!(f, "  rootVO: {r}")?,
            None => writeln!(f, "  rootVO: -")?,
        }
        writeln!(f, "  on-chain entries: {}", c.onchain_eos.len())?;
        for (d, link) in &c.onchain_eos {
            writeln!(f, "    {d} -> {}", link.0)?;
        }
        writeln!(f, "  on-chain votes: {}  reloaded votes: {}  reloaded chunks: {}",
            c.onchain_votes.len(), c.reloaded_votes.len(), c.reloaded_chunks.len())?;
        for (d, n) in c.merged_counts() {
            writeln!(f, "    {d}: {n}")?;
        }
        if !c.dishonest.is_empty() {
            write!(f, "  dishonest:")?;
            for d in &c.dishonest {
                write!(f, " {d}")?;
            }
            writeln!(f)?;
        }
        list(f, "off-chain winners", c.offchain_winners.as_deref())?;
        list(f, "on-chain winners", c.onchain_winners.as_deref())?;
        list(f, "final winners", c.final_winners.as_deref())?;
        writeln!(f, "  refunds: {}  confiscated: {}  client penalty: {}", c.refunds_paid, c.confiscated, c.client_penalty)?;
        for (a, w) in &c.awards {
            writeln!(f, "    award {a}: {w}")?;
        }
        write!(f, "  finalized: {}  aborted: {}", c.finalized, c.aborted)?;
        if c.finalized {
            write!(f, "  residual to client: {}", c.residual_to_client)?;
        }
        writeln!(f)
    }
}
