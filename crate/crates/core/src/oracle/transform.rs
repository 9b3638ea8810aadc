use serde::{Deserialize, Serialize};

use super::{exact_optimal_schedule, OracleError, OracleLimits};
use crate::rational::Rational;
use crate::schedule::{build_timeline, Schedule, Segment};
use crate::taskmodel::{Instance, MachineConfig, TaskGraph};

/// `m` identical machines of speed `speed`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetricConfig {
    pub m: usize,
    pub speed: Rational,
}

impl SymmetricConfig {
    pub fn new(m: usize, speed: Rational) -> Result<Self, OracleError> {
        if m == 0 || !speed.is_positive() {
            return Err(OracleError::InvalidSymmetric);
        }
        Ok(SymmetricConfig { m, speed })
    }

    /// The symmetric platform with the same average speed as `target`.
    pub fn matching(target: &MachineConfig) -> Self {
        SymmetricConfig { m: target.m(), speed: target.average_speed() }
    }

    pub fn config(&self) -> MachineConfig {
        MachineConfig::uniform(self.m, self.speed).expect("validated symmetric config")
    }
}

/// One event-free interval of the transform.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransformStep {
    pub start: Rational,
    pub end: Rational,
    /// Number of running tasks.
    pub lambda: usize,
    pub new_start: Rational,
    pub new_end: Rational,
}

fn check_configs(sym: &SymmetricConfig, target: &MachineConfig) -> Result<(), OracleError> {
    if target.m() != sym.m {
        return Err(OracleError::MachineCountMismatch { expected: sym.m, found: target.m() });
    }
    if target.average_speed() != sym.speed {
        return Err(OracleError::AverageSpeedMismatch { expected: sym.speed, found: target.average_speed() });
    }
    Ok(())
}

/// Moves a schedule from the symmetric platform onto `target`.
///
/// Each event-free interval with `lambda` running tasks is cut into `lambda`
/// equal sub-slices on the `lambda` fastest machines and the tasks rotate
/// through them, so every task sees each of those speeds once. The new
/// interval length keeps each task's work unchanged; later intervals move
/// earlier by whatever is saved.
pub fn asymmetrize_traced(schedule: &Schedule, sym: &SymmetricConfig, target: &MachineConfig) -> Result<(Schedule, Vec<TransformStep>), OracleError> {
    check_configs(sym, target)?;
    let n = schedule.segments.iter().map(|s| s.task + 1).max().unwrap_or(0);
    let free = TaskGraph::new(n, []).expect("edgeless graph");
    schedule.validate(&free, &sym.config()).map_err(OracleError::InvalidSchedule)?;
    let timeline = build_timeline(schedule, sym.m);
    let speeds = target.speeds();
    let mut prefix = vec![Rational::ZERO];
    for &c in speeds {
        prefix.push(*prefix.last().unwrap() + c);
    }

    let mut segments = Vec::new();
    let mut steps = Vec::with_capacity(timeline.interval_count());
    let mut clock = Rational::ZERO;
    for j in 0..timeline.interval_count() {
        let (start, end) = timeline.interval(j);
        let active = timeline.active_tasks(j);
        let lambda = active.len();
        let new_start = clock;
        if lambda > 0 {
            let length = Rational::from(lambda) * sym.speed * (end - start) / prefix[lambda];
            let slice = length / Rational::from(lambda);
            for q in 0..lambda {
                let a = clock + slice * Rational::from(q);
                for (p, &task) in active.iter().enumerate() {
                    segments.push(Segment::new(task, (p + q) % lambda, a, a + slice));
                }
            }
            clock += length;
        }
        steps.push(TransformStep { start, end, lambda, new_start, new_end: clock });
    }
    let mut out = Schedule::new(segments);
    out.coalesce();
    Ok((out.canonical(), steps))
}

pub fn asymmetrize(schedule: &Schedule, sym: &SymmetricConfig, target: &MachineConfig) -> Result<Schedule, OracleError> {
    asymmetrize_traced(schedule, sym, target).map(|(s, _)| s)
}

/// True when some machine is idle somewhere before the makespan.
pub fn has_idle_interval(schedule: &Schedule, m: usize) -> bool {
    let timeline = build_timeline(schedule, m);
    (0..timeline.interval_count()).any(|j| timeline.active_tasks(j).len() < m)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DominanceReport {
    pub symmetric: Rational,
    pub asymmetric: Rational,
    pub strict: bool,
    pub idle: bool,
}

/// Solves `instance` on the symmetric platform, moves the optimum onto
/// `target` and checks the makespan did not grow.
pub fn check_asym_dominance(instance: &Instance, sym: &SymmetricConfig, target: &MachineConfig, limits: &OracleLimits) -> Result<DominanceReport, OracleError> {
    check_configs(sym, target)?;
    let symmetric = instance.with_config(sym.config());
    let (optimum, schedule) = exact_optimal_schedule(&symmetric, limits)?;
    let moved = asymmetrize(&schedule, sym, target)?;
    moved.validate(&instance.graph, target).map_err(OracleError::InvalidSchedule)?;
    let asymmetric = moved.makespan();
    if asymmetric > optimum {
        return Err(OracleError::DominanceViolated { symmetric: optimum, asymmetric });
    }
    Ok(DominanceReport { symmetric: optimum, asymmetric, strict: asymmetric < optimum, idle: has_idle_interval(&schedule, sym.m) })
}
