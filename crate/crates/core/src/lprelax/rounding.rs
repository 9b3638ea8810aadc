use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{solve_instance_lp, speed_based_list_schedule, LpError, LpOptions, LpSolution, SpeedAssignment, SpeedClass};
use crate::bounds::list_bound_quantities;
use crate::rational::{rat, Rational};
use crate::schedule::Schedule;
use crate::taskmodel::{ChainSet, Instance};

/// Seed of trial `trial`: `seed ^ trial` through the splitmix64 finaliser.
pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    let mut z = (seed ^ trial).wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent Bernoulli(`x_j`) draws, exact for rational `x_j`.
pub fn round_a1(lp: &LpSolution, seed: u64) -> SpeedAssignment {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let classes = lp
        .x
        .iter()
        .map(|&x| {
            let denom = x.denom() as u128;
            let numer = x.numer() as u128;
            if rng.random_range(0..denom) < numer {
                SpeedClass::Fast
            } else {
                SpeedClass::Slow
            }
        })
        .collect();
    SpeedAssignment::new(classes)
}

/// Within each chain, makes the first `l_i^1` tasks fast and the rest slow,
/// where `l_i^1` is the chain's number of fast draws.
pub fn improve_a1_tilde(assignment: &SpeedAssignment, chains: &ChainSet) -> Result<SpeedAssignment, LpError> {
    if chains.has_cross_edges() {
        return Err(LpError::NotChains);
    }
    let mut out = assignment.clone();
    for chain in chains.chains() {
        let fast = chain.iter().filter(|&&t| assignment.is_fast(t)).count();
        for (pos, &t) in chain.iter().enumerate() {
            out.set(t, if pos < fast { SpeedClass::Fast } else { SpeedClass::Slow });
        }
    }
    Ok(out)
}

/// Forces every chain with `x_i < ln(n) / n` onto slow processors.
pub fn threshold_a2(
    lp: &LpSolution,
    assignment: &SpeedAssignment,
    chains: &ChainSet,
    n: usize,
) -> Result<SpeedAssignment, LpError> {
    if chains.has_cross_edges() {
        return Err(LpError::NotChains);
    }
    if n == 0 {
        return Ok(assignment.clone());
    }
    let threshold = (n as f64).ln() / n as f64;
    let mut out = assignment.clone();
    for (chain, x) in chains.chains().iter().zip(lp.chain_values(chains)) {
        if x.to_f64() < threshold {
            for &t in chain {
                out.set(t, SpeedClass::Slow);
            }
        }
    }
    Ok(out)
}

/// Fast exactly when `x_j >= 1/2`.
pub fn deterministic_rounding(lp: &LpSolution) -> SpeedAssignment {
    let half = rat(1, 2);
    SpeedAssignment::new(
        lp.x.iter()
            .map(|&x| if x >= half { SpeedClass::Fast } else { SpeedClass::Slow })
            .collect(),
    )
}

/// `20 n` trials, at least one and at most `10^5`.
pub fn default_trials(n: usize) -> usize {
    (20 * n).clamp(1, 100_000)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RoundingConfig {
    pub seed: u64,
    pub trials: usize,
    pub a2_threshold: bool,
    /// Minimum chain length as a fraction of `n` assumed by the asymptotic
    /// analysis. Informational only.
    pub gamma: Rational,
    /// Chernoff constant of the asymptotic analysis. Informational only.
    pub beta: Rational,
}

impl RoundingConfig {
    pub fn new(seed: u64, trials: usize) -> Self {
        RoundingConfig { seed, trials: trials.max(1), a2_threshold: false, gamma: Rational::ZERO, beta: rat(1, 2) }
    }

    pub fn with_a2(mut self, enabled: bool) -> Self {
        self.a2_threshold = enabled;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub makespan: Rational,
    pub n_s: usize,
    #[serde(rename = "C")]
    pub c: Rational,
    #[serde(rename = "D_s")]
    pub d_s: Rational,
    #[serde(rename = "D_1")]
    pub d_1: Rational,
}

impl TrialRecord {
    pub fn list_bound(&self) -> Rational {
        self.c + self.d_s + self.d_1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundingOutcome {
    pub trial: usize,
    pub assignment: SpeedAssignment,
    pub schedule: Schedule,
    pub makespan: Rational,
    /// `l_i^1` per chain.
    pub fast_counts: Vec<usize>,
    /// `l_i^2` per chain.
    pub slow_counts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineReport {
    pub lp: LpSolution,
    pub best: RoundingOutcome,
    pub trials: Vec<TrialRecord>,
}

fn run_trial(
    instance: &Instance,
    lp: &LpSolution,
    rounding: &RoundingConfig,
    trial: usize,
) -> Result<(TrialRecord, SpeedAssignment, Schedule), LpError> {
    let chains_only = !instance.chains.has_cross_edges();
    let mut assignment = round_a1(lp, trial_seed(rounding.seed, trial as u64));
    if chains_only {
        assignment = improve_a1_tilde(&assignment, &instance.chains)?;
        if rounding.a2_threshold {
            assignment = threshold_a2(lp, &assignment, &instance.chains, instance.n())?;
        }
    }
    let schedule = speed_based_list_schedule(instance, &assignment)?;
    let bounds = list_bound_quantities(&instance.graph, &assignment, &instance.config).map_err(|_| LpError::NoSlowMachines)?;
    let record = TrialRecord {
        trial,
        makespan: schedule.makespan(),
        n_s: bounds.n_s,
        c: bounds.c,
        d_s: bounds.d_s,
        d_1: bounds.d_1,
    };
    Ok((record, assignment, schedule))
}

/// Solves the LP once, runs every trial (in parallel; results do not depend
/// on scheduling) and keeps the lowest makespan, breaking ties by trial index.
///
/// Chain collections go through A1, the prefix rule and optionally the
/// threshold step; other DAGs use A1 alone.
pub fn rounding_pipeline(
    instance: &Instance,
    rounding: &RoundingConfig,
    options: &LpOptions,
) -> Result<PipelineReport, LpError> {
    let lp = solve_instance_lp(instance, options)?;
    let results: Vec<_> = (0..rounding.trials.max(1))
        .into_par_iter()
        .map(|trial| run_trial(instance, &lp, rounding, trial))
        .collect::<Result<_, _>>()?;
    let best_index = results
        .iter()
        .enumerate()
        .min_by_key(|(i, (record, _, _))| (record.makespan, *i))
        .map(|(i, _)| i)
        .expect("at least one trial");
    let mut trials = Vec::with_capacity(results.len());
    let mut best = None;
    for (i, (record, assignment, schedule)) in results.into_iter().enumerate() {
        if i == best_index {
            let (fast_counts, slow_counts) = instance
                .chains
                .chains()
                .iter()
                .map(|c| {
                    let fast = c.iter().filter(|&&t| assignment.is_fast(t)).count();
                    (fast, c.len() - fast)
                })
                .unzip();
            best = Some(RoundingOutcome {
                trial: i,
                makespan: record.makespan,
                assignment,
                schedule,
                fast_counts,
                slow_counts,
            });
        }
        trials.push(record);
    }
    Ok(PipelineReport { lp, best: best.expect("best trial exists"), trials })
}
