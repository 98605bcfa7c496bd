//! Decision procedures over well-structured models and a bounded forward
//! oracle used to cross-check them.

mod backward;
mod dot;
mod karp_miller;
mod oracle;
mod rrt;

use thiserror::Error;

use crate::models::ModelError;

pub use backward::{backward_coverability, control_state_reachability, CoverabilityResult};
pub use dot::{km_to_dot, rrt_to_dot};
pub use karp_miller::{karp_miller, KarpMillerTree, KmNode};
pub use oracle::{bounded_forward_oracle, OracleResult};
pub use rrt::{
    boundedness, reduced_reachability_tree, termination, BoundednessResult, PumpingWitness,
    ReducedReachabilityTree, RrtNode, RrtStatus, TerminationResult,
};

pub const DEFAULT_BUDGET: usize = 1_000_000;

/// Resource limits. Exceeding one is an error, never a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budgets {
    /// Basis elements generated during backward saturation.
    pub max_basis: usize,
    /// Configurations stored by the forward oracle.
    pub max_states: usize,
    /// Nodes of a Karp-Miller or reduced reachability tree.
    pub max_nodes: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets { max_basis: DEFAULT_BUDGET, max_states: DEFAULT_BUDGET, max_nodes: DEFAULT_BUDGET }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("unsupported analysis: {0}")]
    Unsupported(String),
    #[error("{what} budget of {limit} exhausted")]
    BudgetExhausted { what: &'static str, limit: usize },
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error(transparent)]
    Model(ModelError),
    #[error("internal error: {0}")]
    Internal(String),
}

impl From<ModelError> for AnalysisError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Unsupported(msg) => AnalysisError::Unsupported(msg),
            ModelError::Budget { limit } => AnalysisError::BudgetExhausted { what: "loss enumeration", limit },
            other => AnalysisError::Model(other),
        }
    }
}
