//! Lower bounds on the optimal makespan and the quantities bounding a
//! speed-based list schedule.

use serde::Serialize;
use thiserror::Error;

use crate::lprelax::{SpeedAssignment, SpeedClass};
use crate::rational::Rational;
use crate::taskmodel::{Instance, MachineConfig, TaskGraph, TwoSpeedView};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error("machine configuration is not a two-speed platform")]
    NotTwoSpeed,
    #[error("need more chains than fast processors (m_s = {m_s}, r = {r})")]
    NotEnoughChains { m_s: usize, r: usize },
    #[error("expected exactly one fast processor, found {m_s}")]
    NotSingleFast { m_s: usize },
    #[error("tasks are assigned to speed 1 but the platform has no slow processors")]
    NoSlowMachines,
    #[error("speed assignment covers {got} tasks, instance has {expected}")]
    AssignmentSize { expected: usize, got: usize },
}

fn two_speed(config: &MachineConfig) -> Result<TwoSpeedView, BoundsError> {
    config.view().ok_or(BoundsError::NotTwoSpeed)
}

/// Average-load bound `n / p` for any speed vector.
pub fn average_load(n: usize, config: &MachineConfig) -> Rational {
    Rational::from(n) / config.total_capability()
}

/// `A = n / (m_s * s + m - m_s)`.
pub fn bound_a(n: usize, config: &MachineConfig) -> Result<Rational, BoundsError> {
    let v = two_speed(config)?;
    let rate = Rational::from(v.m_s) * v.s + Rational::from(v.m - v.m_s);
    Ok(Rational::from(n) / rate)
}

/// `B = max_{1 <= j <= min(r, m)} (l_1 + ... + l_j) / (c(1) + ... + c(j))`.
///
/// `lengths` must be sorted non-increasingly.
pub fn bound_b_general(lengths: &[usize], config: &MachineConfig) -> Rational {
    debug_assert!(lengths.windows(2).all(|w| w[0] >= w[1]));
    let mut work = Rational::ZERO;
    let mut capability = Rational::ZERO;
    let mut best = Rational::ZERO;
    for (&len, &speed) in lengths.iter().zip(config.speeds()) {
        work += Rational::from(len);
        capability += speed;
        best = best.max(work / capability);
    }
    best
}

/// The specialised two-speed form with denominator `m_s (s - 1) + j - 1`,
/// evaluated for `m_s + 1 <= j <= min(r, m)`. It can exceed [`bound_b_general`] and is not
/// used in [`BoundReport::max_lower`].
pub fn bound_b_two_speed(lengths: &[usize], config: &MachineConfig) -> Result<Rational, BoundsError> {
    let v = two_speed(config)?;
    let r = lengths.len();
    if v.m_s >= r {
        return Err(BoundsError::NotEnoughChains { m_s: v.m_s, r });
    }
    let upper = r.min(v.m);
    if upper <= v.m_s {
        return Err(BoundsError::NoSlowMachines);
    }
    let fast_share: usize = lengths[..v.m_s].iter().sum();
    let base = Rational::from(v.m_s) * (v.s - Rational::ONE);
    let mut best: Option<Rational> = None;
    let mut work = Rational::from(fast_share);
    for j in v.m_s + 1..=upper {
        work += Rational::from(lengths[j - 1]);
        let value = work / (base + Rational::from(j) - Rational::ONE);
        best = Some(best.map_or(value, |b| b.max(value)));
    }
    Ok(best.expect("range is non-empty"))
}

/// `n / (s + min(r - 1, m))` for a single fast processor.
pub fn bound_single_fast(n: usize, r: usize, config: &MachineConfig) -> Result<Rational, BoundsError> {
    let v = two_speed(config)?;
    if v.m_s != 1 {
        return Err(BoundsError::NotSingleFast { m_s: v.m_s });
    }
    let parallel = r.saturating_sub(1).min(v.m);
    Ok(Rational::from(n) / (v.s + Rational::from(parallel)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    #[serde(rename = "A")]
    pub a: Rational,
    #[serde(rename = "B_general")]
    pub b_general: Rational,
    #[serde(rename = "B_two_speed")]
    pub b_two_speed: Option<Rational>,
    pub single_fast: Option<Rational>,
    pub max_lower: Rational,
}

/// All applicable lower bounds. `A` falls back to `n / p` on platforms that
/// are not two-speed (it coincides with the two-speed formula otherwise).
pub fn bound_report(instance: &Instance) -> BoundReport {
    let n = instance.n();
    let config = &instance.config;
    let lengths = instance.chains.lengths();
    let a = average_load(n, config);
    let b_general = bound_b_general(&lengths, config);
    let b_two_speed = bound_b_two_speed(&lengths, config).ok();
    let single_fast = bound_single_fast(n, lengths.len(), config).ok();
    let mut max_lower = a.max(b_general);
    if let Some(sf) = single_fast {
        max_lower = max_lower.max(sf);
    }
    BoundReport { a, b_general, b_two_speed, single_fast, max_lower }
}

/// `max(A, B_general)`.
pub fn max_lower_bound(instance: &Instance) -> Rational {
    average_load(instance.n(), &instance.config).max(bound_b_general(&instance.chains.lengths(), &instance.config))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ListBoundReport {
    #[serde(rename = "C")]
    pub c: Rational,
    #[serde(rename = "D_s")]
    pub d_s: Rational,
    #[serde(rename = "D_1")]
    pub d_1: Rational,
    pub n_s: usize,
}

impl ListBoundReport {
    pub fn total(&self) -> Rational {
        self.c + self.d_s + self.d_1
    }
}

/// `C`, `D_s`, `D_1` and `n_s` for a speed assignment.
///
/// `C` is the heaviest directed path when task `j` weighs `1 / c(j)`; on a
/// collection of chains that is the heaviest chain.
pub fn list_bound_quantities(
    graph: &TaskGraph,
    assignment: &SpeedAssignment,
    config: &MachineConfig,
) -> Result<ListBoundReport, BoundsError> {
    let v = two_speed(config)?;
    let n = graph.n();
    if assignment.len() != n {
        return Err(BoundsError::AssignmentSize { expected: n, got: assignment.len() });
    }
    let n_s = assignment.fast_count();
    if n_s < n && v.m == v.m_s {
        return Err(BoundsError::NoSlowMachines);
    }
    let weight = |t: usize| match assignment.class(t) {
        SpeedClass::Fast => v.s.recip(),
        SpeedClass::Slow => Rational::ONE,
    };
    let mut heaviest = vec![Rational::ZERO; n];
    let mut c = Rational::ZERO;
    for &t in graph.topo_order() {
        let before = graph.preds(t).iter().map(|&p| heaviest[p]).max().unwrap_or(Rational::ZERO);
        heaviest[t] = before + weight(t);
        c = c.max(heaviest[t]);
    }
    let d_s = Rational::from(n_s) / (v.s * Rational::from(v.m_s));
    let d_1 = if v.m == v.m_s {
        Rational::ZERO
    } else {
        Rational::from(n - n_s) / Rational::from(v.m - v.m_s)
    };
    Ok(ListBoundReport { c, d_s, d_1, n_s })
}
