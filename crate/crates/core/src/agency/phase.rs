use core::fmt;

use serde::{Deserialize, Serialize};

/// Contest phases. Review and audit are split into epochs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Phase {
    Initial,
    Entry,
    /// Review epoch 1: designers reveal their sealing keys.
    ReviewKeyReveal,
    /// Review epoch 2: voting.
    ReviewVoting,
    /// Review epoch 3: verdict.
    ReviewVerdict,
    /// Audit epoch 1: double-vote reports.
    AuditDoubleVotes,
    /// Audit epoch 2: chunk reloads and on-chain verdict.
    AuditReload,
    Finalized,
}

impl Phase {
    pub const TIMED: [Phase; 7] = [
        Phase::Entry,
        Phase::ReviewKeyReveal,
        Phase::ReviewVoting,
        Phase::ReviewVerdict,
        Phase::AuditDoubleVotes,
        Phase::AuditReload,
        Phase::Finalized,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Phase::Initial => "initial",
            Phase::Entry => "entry",
            Phase::ReviewKeyReveal => "review.e1",
            Phase::ReviewVoting => "review.e2",
            Phase::ReviewVerdict => "review.e3",
            Phase::AuditDoubleVotes => "audit.e1",
            Phase::AuditReload => "audit.e2",
            Phase::Finalized => "finalized",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// End timestamps of entry, the three review epochs and the two audit epochs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Deadlines(pub [u64; 6]);

impl Deadlines {
    pub fn evenly_spaced(start: u64, spacing: u64) -> Self {
        let mut d = [0u64; 6];
        for (i, slot) in d.iter_mut().enumerate() {
            *slot = start + spacing * (i as u64 + 1);
        }
        Deadlines(d)
    }

    /// Strictly increasing and all in the future.
    pub fn is_valid_at(&self, now: u64) -> bool {
        self.0[0] > now && self.0.windows(2).all(|w| w[0] < w[1])
    }

    pub fn phase_at(&self, now: u64) -> Phase {
        match self.0.iter().position(|d| now < *d) {
            Some(i) => Phase::TIMED[i],
            None => Phase::Finalized,
        }
    }

    /// Exclusive end of a timed phase.
    pub fn end_of(&self, phase: Phase) -> Option<u64> {
        let i = Phase::TIMED[..6].iter().position(|p| *p == phase)?;
        Some(self.0[i])
    }

    /// Inclusive start of a timed phase; entry starts at `created`.
    pub fn start_of(&self, phase: Phase, created: u64) -> Option<u64> {
        match phase {
            Phase::Entry => Some(created),
            Phase::Finalized => Some(self.0[5]),
            _ => {
                let i = Phase::TIMED.iter().position(|p| *p == phase)?;
                Some(self.0[i - 1])
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phases_follow_clock() {
        let d = Deadlines::evenly_spaced(0, 100);
        assert_eq!(d.0, [100, 200, 300, 400, 500, 600]);
        assert_eq!(d.phase_at(0), Phase::Entry);
        assert_eq!(d.phase_at(99), Phase::Entry);
        assert_eq!(d.phase_at(100), Phase::ReviewKeyReveal);
        assert_eq!(d.phase_at(250), Phase::ReviewVoting);
        assert_eq!(d.phase_at(399), Phase::ReviewVerdict);
        assert_eq!(d.phase_at(400), Phase::AuditDoubleVotes);
        assert_eq!(d.phase_at(599), Phase::AuditReload);
        assert_eq!(d.phase_at(600), Phase::Finalized);
        assert_eq!(d.end_of(Phase::ReviewVoting), Some(300));
        assert_eq!(d.start_of(Phase::ReviewVoting, 0), Some(200));
        assert_eq!(d.start_of(Phase::Entry, 3), Some(3));
    }

    #[test]
    fn monotone_transitions() {
        let d = Deadlines([10, 20, 35, 40, 70, 71]);
        let mut last = Phase::Initial;
        for t in 0..100 {
            let p = d.phase_at(t);
            assert!(p >= last);
            last = p;
        }
    }

    #[test]
    fn validity() {
        assert!(Deadlines([10, 20, 30, 40, 50, 60]).is_valid_at(0));
        assert!(!Deadlines([10, 5, 30, 40, 50, 60]).is_valid_at(0));
        assert!(!Deadlines([10, 10, 30, 40, 50, 60]).is_valid_at(0));
        assert!(!Deadlines([10, 20, 30, 40, 50, 60]).is_valid_at(10));
    }
}
