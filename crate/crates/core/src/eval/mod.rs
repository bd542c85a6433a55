//! Verification oracles and metrics.

use alloc::string::String;

use crate::machine::MachineError;
use crate::mapping::{ConfigError, MappingError};

pub mod enumerate;
pub mod equivalence;
pub mod reliability;
pub mod sim;

pub use enumerate::{brute_force_optimal, for_each_solution, BruteForce, DEFAULT_ENUMERATION_CAP};
pub use equivalence::{equivalence_check, Equivalence, EQUIVALENCE_TOLERANCE};
pub use reliability::{
    failure_events, monte_carlo_success, reliability_score, FailureModel, McEstimate, TrialModel,
};
pub use sim::{simulate, tv_distance, Distribution, SimError, Statevector};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("instance too large to enumerate")]
    TooLarge,
    #[error("no feasible solution exists")]
    Infeasible,
    #[error("gate {gate}: CNOT has no route")]
    MissingRoute { gate: usize },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Machine(#[from] MachineError),
    #[error(transparent)]
    Mapping(#[from] MappingError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Metrics of one compiled benchmark.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvalReport {
    pub benchmark: String,
    pub variant: String,
    /// Analytic program reliability.
    pub reliability: f64,
    pub mc_success: f64,
    pub stderr: f64,
    pub trials: u64,
    pub makespan: u64,
    pub swaps: usize,
    pub compile_time_s: f64,
    /// `None` when the circuit is too large to simulate.
    pub equivalence: Option<bool>,
}
