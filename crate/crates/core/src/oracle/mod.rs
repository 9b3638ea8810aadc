//! Desk-scale ground truth: exact optimal makespan by branch-and-bound, exact
//! minimum preemptive energy for tiny instances, and the transform from a
//! symmetric platform to an asymmetric one with the same average speed.

mod energy;
mod search;
mod transform;

use thiserror::Error;

use crate::rational::Rational;
use crate::schedule::ScheduleError;

pub use energy::exhaustive_min_energy;
pub use search::{exact_optimal_makespan, exact_optimal_schedule};
pub use transform::{asymmetrize, asymmetrize_traced, check_asym_dominance, has_idle_interval, DominanceReport, SymmetricConfig, TransformStep};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance too large for the exact oracle (n = {n}, m = {m})")]
    SizeLimitExceeded { n: usize, m: usize },
    #[error("search gave up after {nodes} nodes")]
    SearchBudgetExceeded { nodes: u64 },
    #[error("power c^{alpha} is not rational for some speed")]
    NonRationalPower { alpha: Rational },
    #[error("no schedule meets the makespan cap")]
    CapInfeasible,
    #[error("value overflows the rational range")]
    Overflow,
    #[error("symmetric platform needs m > 0 and a positive speed")]
    InvalidSymmetric,
    #[error("target average speed {found} differs from symmetric speed {expected}")]
    AverageSpeedMismatch { expected: Rational, found: Rational },
    #[error("target has {found} machines, symmetric platform has {expected}")]
    MachineCountMismatch { expected: usize, found: usize },
    #[error("asymmetric makespan {asymmetric} exceeds symmetric optimum {symmetric}")]
    DominanceViolated { symmetric: Rational, asymmetric: Rational },
    #[error("invalid schedule: {0}")]
    InvalidSchedule(ScheduleError),
}

/// Size guard and node budget for the makespan search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_tasks: usize,
    pub max_machines: usize,
    pub max_nodes: u64,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { max_tasks: 14, max_machines: 4, max_nodes: 500_000_000 }
    }
}

/// Size guard for the energy oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnergyLimits {
    pub max_tasks: usize,
    pub max_machines: usize,
}

impl Default for EnergyLimits {
    fn default() -> Self {
        EnergyLimits { max_tasks: 4, max_machines: 3 }
    }
}
