use serde::{Deserialize, Serialize};

use super::ScenarioConfig;
use crate::ledger::{Function, GasSchedule, Mode};
use crate::offchain::Behavior;

/// Per-step USD coefficients of the protocol cost envelope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    /// Entry self-submission.
    pub c_eo: f64,
    /// Vote self-submission plus its share of a reload.
    pub c_vo: f64,
    /// Double-vote report.
    pub c_dv: f64,
    /// On-chain verdict over all entries.
    pub c_ov: f64,
    /// Client calls that do not depend on the crowd.
    pub c_rest: f64,
    /// Fraction of designers that may trigger a countermeasure.
    pub p_d: f64,
    /// Fraction of reviewers that may trigger a countermeasure.
    pub p_r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostBounds {
    pub low: f64,
    pub high: f64,
}

impl CostBounds {
    /// Inclusive, with slack for float summation.
    pub fn contains(&self, usd: f64) -> bool {
        // Reports round to four decimals.
        let eps = 1e-4;
        usd >= self.low - eps && usd <= self.high + eps
    }
}

fn usd(s: &GasSchedule, f: Function, items: u64) -> f64 {
    s.cost_usd(f, items).unwrap_or(0.0)
}

impl CostModel {
    /// Coefficients for an NF-Crowd contest with `designers` entries. The
    /// client calls counted in `c_rest` are the ones its strategy makes.
    pub fn nfcrowd(schedule: &GasSchedule, designers: usize, withhold_roots: bool, withhold_verdict: bool) -> Self {
        let s = schedule;
        let mut c_rest = usd(s, Function::NewContest, 0);
        if !withhold_roots {
            c_rest += usd(s, Function::RootEo, 0) + usd(s, Function::RootVo, 0);
        }
        if !withhold_verdict {
            c_rest += usd(s, Function::OffChainVerdict, 0);
        }
        CostModel {
            c_eo: usd(s, Function::SubmitEo, 0),
            c_vo: usd(s, Function::SubmitVo, 0) + usd(s, Function::ReloadChunkVo, 1),
            c_dv: usd(s, Function::DoubleVotes, 0),
            c_ov: usd(s, Function::OnchainVerdict, designers as u64),
            c_rest,
            p_d: 1.0,
            p_r: 1.0,
        }
    }

    pub fn low(&self) -> f64 {
        self.c_rest
    }

    pub fn high(&self, designers: usize, reviewers: usize) -> f64 {
        self.c_eo * self.p_d * designers as f64
            + (self.c_vo + self.c_dv) * self.p_r * reviewers as f64
            + self.c_ov
            + self.c_rest
    }
}

/// Envelope every run of `cfg` must fall into.
pub fn cost_bounds(cfg: &ScenarioConfig) -> CostBounds {
    let s = cfg.schedule();
    match cfg.mode {
        Mode::NfCrowd => {
            let m = CostModel::nfcrowd(
                &s,
                cfg.designers,
                cfg.client.has(&Behavior::WithholdRoots),
                cfg.client.has(&Behavior::WithholdVerdict),
            );
            CostBounds { low: m.low(), high: m.high(cfg.designers, cfg.reviewers) }
        }
        Mode::Strawman => {
            let base = usd(&s, Function::NewContest, 0);
            let verdict = if cfg.client.has(&Behavior::WithholdVerdict) {
                0.0
            } else {
                usd(&s, Function::Verdict, cfg.designers as u64)
            };
            let high = base
                + verdict
                + usd(&s, Function::SubmitEo, 0) * cfg.designers as f64
                + usd(&s, Function::SubmitVo, 0) * cfg.reviewers as f64;
            CostBounds { low: base + usd(&s, Function::Verdict, 0).min(verdict), high }
        }
    }
}

/// Closed-form strawman cost with every agent taking part.
pub fn strawman_formula_usd(designers: usize, reviewers: usize) -> f64 {
    0.64 + 0.426 * designers as f64 + 0.18 * reviewers as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_is_constant_and_high_linear() {
        let s = GasSchedule::reference(Mode::NfCrowd);
        let lows: alloc::vec::Vec<f64> =
            [10, 1000].iter().map(|n| CostModel::nfcrowd(&s, *n, false, false).low()).collect();
        assert_eq!(lows[0], lows[1]);
        assert!((lows[0] - 1.16).abs() < 1e-9);
        let h = |n: usize| CostModel::nfcrowd(&s, n, false, false).high(n, n);
        let (h0, h1, h2) = (h(0), h(100), h(200));
        assert!(((h2 - h1) - (h1 - h0)).abs() <= 0.01 * (h1 - h0));
    }
}
