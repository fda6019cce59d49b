//! Scenario runner, cost envelope, adversary matrix and cost comparison.

mod compare;
mod config;
mod cost;
mod matrix;
mod random;
mod scenario;

pub use compare::{compare, external_reference, CompareReport, CompareRow, CENTRALIZED_FEE, EXTERNAL_REFERENCE};
pub use config::ScenarioConfig;
pub use cost::{cost_bounds, strawman_formula_usd, CostBounds, CostModel};
pub use matrix::{adversary_matrix, run_adversary_matrix, Colluders, MatrixRow};
pub use random::random_scenario;
pub use scenario::{
    agency_address, build_simulation, oracle, round_usd, run_scenario, run_scenario_full, ConservationAudit, DepositFlows,
    Oracle, ScenarioReport, ScenarioRun,
};

use alloc::string::String;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HarnessError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}
