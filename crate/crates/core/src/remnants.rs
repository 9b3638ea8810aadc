//! Round-based non-preemptive scheduling of independent chains on one fast
//! processor (integer speed `s`) and `m - 1` unit-speed processors.
//!
//! Each round covers the window `[k - 1, k]`. The remaining chain suffixes
//! (remnants) are sorted by length, longest first. The fast processor runs up
//! to `s` head tasks back to back, draining remnants in that order; each slow
//! processor then takes one head task from the next remnants the fast
//! processor did not touch. The result is within `1/s` of the optimum.

use serde::Serialize;
use thiserror::Error;

use crate::rational::Rational;
use crate::schedule::{Schedule, Segment};
use crate::taskmodel::{ChainSet, MachineConfig};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RemnantsError {
    #[error("machine configuration is not a two-speed platform")]
    NotTwoSpeed,
    #[error("expected exactly one fast processor, found {m_s}")]
    NotSingleFast { m_s: usize },
    #[error("fast speed {s} is not an integer")]
    NonIntegerSpeed { s: Rational },
    #[error("chains are joined by {count} cross-chain edges")]
    CrossChainEdges { count: usize },
    #[error("makespan {makespan} exceeds optimum {optimum} + 1/{s}")]
    GuaranteeViolated { makespan: Rational, optimum: Rational, s: Rational },
}

/// A remnant at the start of a round: `(chain index, remaining length)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Remnant {
    pub chain: usize,
    pub len: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RoundTrace {
    /// 1-based round number.
    pub round: usize,
    /// Non-empty remnants in processing order.
    pub remnants: Vec<Remnant>,
    /// `(chain, tasks taken)` by the fast processor, in order.
    pub fast: Vec<(usize, usize)>,
    /// `(chain, machine)` for each slow processor used.
    pub slow: Vec<(usize, usize)>,
    /// Number of non-empty remnants `g_k`.
    pub g: usize,
}

/// Fast machine is 0, slow machines are `1..m`.
pub fn remnants_schedule(chains: &ChainSet, config: &MachineConfig) -> Result<(Schedule, Vec<RoundTrace>), RemnantsError> {
    let view = config.view().ok_or(RemnantsError::NotTwoSpeed)?;
    if view.m_s != 1 {
        return Err(RemnantsError::NotSingleFast { m_s: view.m_s });
    }
    if !view.s.is_integer() {
        return Err(RemnantsError::NonIntegerSpeed { s: view.s });
    }
    if chains.has_cross_edges() {
        return Err(RemnantsError::CrossChainEdges { count: chains.cross_edges().len() });
    }
    let s = usize::try_from(view.s.numer()).expect("speed fits in usize");
    let step = view.s.recip();
    let slow_machines = view.m - 1;

    let mut next: Vec<usize> = vec![0; chains.r()];
    let mut segments = Vec::with_capacity(chains.n());
    let mut traces = Vec::new();
    let mut round = 0;
    loop {
        let mut remnants: Vec<Remnant> = chains
            .chains()
            .iter()
            .enumerate()
            .filter(|(i, c)| next[*i] < c.len())
            .map(|(i, c)| Remnant { chain: i, len: c.len() - next[i] })
            .collect();
        if remnants.is_empty() {
            break;
        }
        round += 1;
        // Stable: equal lengths keep chain order.
        remnants.sort_by_key(|r| std::cmp::Reverse(r.len));
        let base = Rational::from(round - 1);
        let g = remnants.len();

        let mut budget = s;
        let mut fast = Vec::new();
        let mut slot = 0;
        let mut v = 0;
        while budget > 0 && v < g {
            let rem = remnants[v];
            let take = budget.min(rem.len);
            for _ in 0..take {
                let task = chains.chains()[rem.chain][next[rem.chain]];
                let start = base + step * Rational::from(slot);
                segments.push(Segment::new(task, 0, start, start + step));
                next[rem.chain] += 1;
                slot += 1;
            }
            fast.push((rem.chain, take));
            budget -= take;
            v += 1;
        }

        let mut slow = Vec::new();
        for (offset, rem) in remnants[v..].iter().take(slow_machines).enumerate() {
            let machine = offset + 1;
            let task = chains.chains()[rem.chain][next[rem.chain]];
            segments.push(Segment::new(task, machine, base, base + Rational::ONE));
            next[rem.chain] += 1;
            slow.push((rem.chain, machine));
        }
        traces.push(RoundTrace { round, remnants, fast, slow, g });
    }
    Ok((Schedule::new(segments).canonical(), traces))
}

/// Checks `makespan <= t_opt + 1/s` for the Remnants schedule.
pub fn check_remnants_guarantee(chains: &ChainSet, config: &MachineConfig, t_opt: Rational) -> Result<Rational, RemnantsError> {
    let (schedule, _) = remnants_schedule(chains, config)?;
    let makespan = schedule.makespan();
    let s = config.speed(0);
    if makespan > t_opt + s.recip() {
        return Err(RemnantsError::GuaranteeViolated { makespan, optimum: t_opt, s });
    }
    Ok(makespan)
}
