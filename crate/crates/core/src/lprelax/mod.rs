//! Speed assignment through an LP relaxation and randomized rounding.
//!
//! The program decides, per task, whether it runs on a fast processor
//! (`x_j = 1`) or a slow one (`y_j = 1`). Its relaxation is solved exactly,
//! rounded at random (A1), improved per chain (prefix rule), optionally
//! thresholded, and each rounded assignment is turned into a schedule by
//! speed-based list scheduling.

mod list;
mod program;
mod rounding;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::simplex::SimplexError;

pub use list::speed_based_list_schedule;
pub use program::{
    build_mip, solve_chain_lp, solve_instance_lp, solve_lp, LpOptions, LpSolution, MipProgram, MipRow, RowCounts,
    RowKind, Var,
};
pub use rounding::{
    default_trials, deterministic_rounding, improve_a1_tilde, round_a1, rounding_pipeline, threshold_a2, trial_seed,
    PipelineReport, RoundingConfig, RoundingOutcome, TrialRecord,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("machine configuration is not a two-speed platform")]
    NotTwoSpeed,
    #[error("instance is not a collection of independent chains")]
    NotChains,
    #[error("tasks are assigned to speed 1 but the platform has no slow processors")]
    NoSlowMachines,
    #[error("speed assignment covers {got} tasks, instance has {expected}")]
    AssignmentSize { expected: usize, got: usize },
    #[error("LP relaxation is infeasible")]
    Infeasible,
    #[error("instance with {n} tasks exceeds the LP size limit of {limit}")]
    SizeLimitExceeded { n: usize, limit: usize },
    #[error("LP solution does not fit in 128-bit rationals")]
    Overflow,
}

impl From<SimplexError> for LpError {
    fn from(err: SimplexError) -> Self {
        match err {
            SimplexError::Infeasible | SimplexError::Unbounded => LpError::Infeasible,
            SimplexError::SizeLimitExceeded { limit, .. } => LpError::SizeLimitExceeded { n: 0, limit },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpeedClass {
    Fast,
    Slow,
}

/// A fast/slow class for every task.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpeedAssignment(Vec<SpeedClass>);

impl SpeedAssignment {
    pub fn new(classes: Vec<SpeedClass>) -> Self {
        SpeedAssignment(classes)
    }

    pub fn uniform(n: usize, class: SpeedClass) -> Self {
        SpeedAssignment(vec![class; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn class(&self, task: usize) -> SpeedClass {
        self.0[task]
    }

    pub fn is_fast(&self, task: usize) -> bool {
        self.0[task] == SpeedClass::Fast
    }

    pub fn set(&mut self, task: usize, class: SpeedClass) {
        self.0[task] = class;
    }

    pub fn classes(&self) -> &[SpeedClass] {
        &self.0
    }

    pub fn fast_count(&self) -> usize {
        self.0.iter().filter(|&&c| c == SpeedClass::Fast).count()
    }
}
