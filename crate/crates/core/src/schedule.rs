//! Possibly-preemptive schedules over exact rational time.
//!
//! A [`Schedule`] is a bag of [`Segment`]s: task `t` runs on machine `k`
//! during `[start, end)`. A schedule is valid for an instance when
//!
//! * no machine runs two segments at once (touching endpoints are fine),
//! * no task runs on two machines at once,
//! * every task receives exactly one unit of work (`sum duration * speed = 1`),
//! * for every edge `(i, j)`, the last piece of `i` ends before the first piece of `j` starts.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::power::{pow_value, EnergyValue};
use crate::rational::Rational;
use crate::taskmodel::{EnergyParams, Instance, MachineConfig, TaskGraph, TaskId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Segment {
    pub task: TaskId,
    pub machine: usize,
    pub start: Rational,
    pub end: Rational,
}

impl Segment {
    pub fn new(task: TaskId, machine: usize, start: Rational, end: Rational) -> Self {
        Segment { task, machine, start, end }
    }

    pub fn duration(&self) -> Rational {
        self.end - self.start
    }

    /// Open-interval intersection: touching segments do not overlap.
    pub fn overlaps(&self, other: &Segment) -> bool {
        self.start < other.end && other.start < self.end
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleError {
    #[error("segment {index} is malformed: {reason}")]
    InvalidSegment { index: usize, reason: String },
    #[error("machine {machine} runs task {} on [{}, {}] and task {} on [{}, {}] at once",
        .first.task, .first.start, .first.end, .second.task, .second.start, .second.end)]
    MachineOverlap { machine: usize, first: Segment, second: Segment },
    #[error("task {task} runs on machines {} and {} at once", .first.machine, .second.machine)]
    TaskSelfOverlap { task: TaskId, first: Segment, second: Segment },
    #[error("task {task} receives work {work}, expected 1")]
    WorkMismatch { task: TaskId, work: Rational },
    #[error("precedence {pred} -> {succ} violated: {pred} completes at {pred_end} but {succ} starts at {succ_start}")]
    PrecedenceViolation { pred: TaskId, succ: TaskId, pred_end: Rational, succ_start: Rational },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnergyError {
    #[error("speed {speed} raised to alpha = {alpha} is irrational; use the approximate energy mode")]
    NonRepresentablePower { speed: Rational, alpha: Rational },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub segments: Vec<Segment>,
}

impl Schedule {
    pub fn new(segments: Vec<Segment>) -> Self {
        Schedule { segments }
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Sorts segments by `(start, machine, task, end)` for stable output.
    pub fn canonicalize(&mut self) {
        self.segments.sort_by(|a, b| {
            (a.start, a.machine, a.task, a.end).cmp(&(b.start, b.machine, b.task, b.end))
        });
    }

    pub fn canonical(mut self) -> Self {
        self.canonicalize();
        self
    }

    /// Merges abutting segments of the same task on the same machine.
    pub fn coalesce(&mut self) {
        self.segments.sort_by(|a, b| (a.machine, a.start, a.task).cmp(&(b.machine, b.start, b.task)));
        let mut merged: Vec<Segment> = Vec::with_capacity(self.segments.len());
        for seg in self.segments.drain(..) {
            match merged.last_mut() {
                Some(last) if last.machine == seg.machine && last.task == seg.task && last.end == seg.start => {
                    last.end = seg.end;
                }
                _ => merged.push(seg),
            }
        }
        self.segments = merged;
        self.canonicalize();
    }

    pub fn validate(&self, graph: &TaskGraph, config: &MachineConfig) -> Result<(), ScheduleError> {
        validate(self, graph, config)
    }

    pub fn validate_for(&self, instance: &Instance) -> Result<(), ScheduleError> {
        validate(self, &instance.graph, &instance.config)
    }

    pub fn makespan(&self) -> Rational {
        makespan(self)
    }

    pub fn energy(&self, config: &MachineConfig, params: &EnergyParams) -> Result<Rational, EnergyError> {
        energy(self, config, params)
    }

    /// Completion time of each task (`None` for tasks without segments).
    pub fn completion_times(&self, n: usize) -> Vec<Option<Rational>> {
        let mut done = vec![None; n];
        for seg in &self.segments {
            let slot: &mut Option<Rational> = &mut done[seg.task];
            *slot = Some(slot.map_or(seg.end, |e: Rational| e.max(seg.end)));
        }
        done
    }

    /// Earliest start of each task (`None` for tasks without segments).
    pub fn start_times(&self, n: usize) -> Vec<Option<Rational>> {
        let mut first = vec![None; n];
        for seg in &self.segments {
            let slot: &mut Option<Rational> = &mut first[seg.task];
            *slot = Some(slot.map_or(seg.start, |s: Rational| s.min(seg.start)));
        }
        first
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.clone().canonical()).expect("schedule serialises")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

pub fn validate(schedule: &Schedule, graph: &TaskGraph, config: &MachineConfig) -> Result<(), ScheduleError> {
    let n = graph.n();
    let m = config.m();
    for (index, seg) in schedule.segments.iter().enumerate() {
        let reason = if seg.end <= seg.start {
            Some(format!("end {} is not after start {}", seg.end, seg.start))
        } else if seg.start.is_negative() {
            Some(format!("negative start {}", seg.start))
        } else if seg.machine >= m {
            Some(format!("machine {} out of range for m = {m}", seg.machine))
        } else if seg.task >= n {
            Some(format!("task {} out of range for n = {n}", seg.task))
        } else {
            None
        };
        if let Some(reason) = reason {
            return Err(ScheduleError::InvalidSegment { index, reason });
        }
    }

    let mut by_machine = schedule.segments.clone();
    by_machine.sort_by_key(|s| (s.machine, s.start, s.end));
    for pair in by_machine.windows(2) {
        if pair[0].machine == pair[1].machine && pair[0].overlaps(&pair[1]) {
            return Err(ScheduleError::MachineOverlap { machine: pair[0].machine, first: pair[0], second: pair[1] });
        }
    }

    let mut by_task = schedule.segments.clone();
    by_task.sort_by_key(|s| (s.task, s.start, s.end));
    for pair in by_task.windows(2) {
        if pair[0].task == pair[1].task && pair[0].overlaps(&pair[1]) {
            return Err(ScheduleError::TaskSelfOverlap { task: pair[0].task, first: pair[0], second: pair[1] });
        }
    }

    let mut work = vec![Rational::ZERO; n];
    for seg in &schedule.segments {
        work[seg.task] += seg.duration() * config.speed(seg.machine);
    }
    if let Some(task) = work.iter().position(|&w| w != Rational::ONE) {
        return Err(ScheduleError::WorkMismatch { task, work: work[task] });
    }

    let done = schedule.completion_times(n);
    let first = schedule.start_times(n);
    for &(pred, succ) in graph.edges() {
        let (pred_end, succ_start) = (done[pred].expect("every task has work"), first[succ].expect("every task has work"));
        if pred_end > succ_start {
            return Err(ScheduleError::PrecedenceViolation { pred, succ, pred_end, succ_start });
        }
    }
    Ok(())
}

/// Latest segment end; zero for the empty schedule.
pub fn makespan(schedule: &Schedule) -> Rational {
    schedule.segments.iter().map(|s| s.end).max().unwrap_or(Rational::ZERO)
}

/// `sum c(machine)^alpha * duration`, exactly. Fails when some `c^alpha` is irrational.
pub fn energy(schedule: &Schedule, config: &MachineConfig, params: &EnergyParams) -> Result<Rational, EnergyError> {
    let powers = PowerTable::new(config, params);
    schedule
        .segments
        .iter()
        .map(|seg| {
            powers.exact(seg.machine).map(|p| p * seg.duration()).ok_or(EnergyError::NonRepresentablePower {
                speed: config.speed(seg.machine),
                alpha: params.alpha(),
            })
        })
        .sum()
}

/// Energy that falls back to 64-bit fixed point when powers are irrational.
pub fn energy_value(schedule: &Schedule, config: &MachineConfig, params: &EnergyParams) -> EnergyValue {
    let powers = PowerTable::new(config, params);
    schedule
        .segments
        .iter()
        .fold(EnergyValue::Exact(Rational::ZERO), |acc, seg| acc + powers.value(seg.machine).scale(seg.duration()))
}

/// `c(k)^alpha` for every machine.
#[derive(Debug, Clone)]
pub struct PowerTable {
    powers: Vec<EnergyValue>,
}

impl PowerTable {
    pub fn new(config: &MachineConfig, params: &EnergyParams) -> Self {
        Self::with_exponent(config, params.alpha())
    }

    /// Any non-negative exponent; `1` gives plain work rates.
    pub fn with_exponent(config: &MachineConfig, exponent: Rational) -> Self {
        PowerTable { powers: config.speeds().iter().map(|&c| pow_value(c, exponent)).collect() }
    }

    pub fn value(&self, machine: usize) -> EnergyValue {
        self.powers[machine]
    }

    pub fn exact(&self, machine: usize) -> Option<Rational> {
        self.powers[machine].exact()
    }

    pub fn all_exact(&self) -> bool {
        self.powers.iter().all(|p| p.exact().is_some())
    }
}

/// Event-free intervals `[t_j, t_{j+1}]` and which task each machine runs in each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Timeline {
    pub breakpoints: Vec<Rational>,
    /// `occupancy[j][k]`: task on machine `k` during interval `j`.
    pub occupancy: Vec<Vec<Option<TaskId>>>,
}

impl Timeline {
    pub fn interval_count(&self) -> usize {
        self.breakpoints.len().saturating_sub(1)
    }

    pub fn interval(&self, j: usize) -> (Rational, Rational) {
        (self.breakpoints[j], self.breakpoints[j + 1])
    }

    /// Tasks running during interval `j`, in machine order.
    pub fn active_tasks(&self, j: usize) -> Vec<TaskId> {
        self.occupancy[j].iter().flatten().copied().collect()
    }
}

/// Breakpoints are 0 plus every segment start and end.
pub fn build_timeline(schedule: &Schedule, m: usize) -> Timeline {
    let mut points: BTreeSet<Rational> = BTreeSet::new();
    points.insert(Rational::ZERO);
    for seg in &schedule.segments {
        points.insert(seg.start);
        points.insert(seg.end);
    }
    let breakpoints: Vec<Rational> = points.into_iter().collect();
    let mut occupancy = vec![vec![None; m]; breakpoints.len().saturating_sub(1)];
    for seg in &schedule.segments {
        let first = breakpoints.binary_search(&seg.start).expect("start is a breakpoint");
        let last = breakpoints.binary_search(&seg.end).expect("end is a breakpoint");
        for slot in &mut occupancy[first..last] {
            slot[seg.machine] = Some(seg.task);
        }
    }
    Timeline { breakpoints, occupancy }
}

/// A maximal window during which the supported set does not change.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub start: Rational,
    pub end: Rational,
    /// Tasks completed, running or ready in this window, sorted.
    pub supported: Vec<TaskId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportedSetBlocks {
    pub blocks: Vec<Block>,
}

impl SupportedSetBlocks {
    pub fn boundaries(&self) -> Vec<Rational> {
        let mut out: Vec<Rational> = self.blocks.iter().map(|b| b.start).collect();
        if let Some(last) = self.blocks.last() {
            out.push(last.end);
        }
        out
    }
}

/// Splits `[0, makespan]` where the supported set grows.
///
/// A task is supported (completed, running or ready) once all of its
/// predecessors have completed, so the set only changes at times when the last
/// predecessor of some task completes.
pub fn supported_set_blocks(schedule: &Schedule, graph: &TaskGraph) -> SupportedSetBlocks {
    let end = makespan(schedule);
    if end.is_zero() {
        return SupportedSetBlocks { blocks: Vec::new() };
    }
    let done = schedule.completion_times(graph.n());
    let enabled_at: Vec<Rational> = (0..graph.n())
        .map(|t| {
            graph
                .preds(t)
                .iter()
                .map(|&p| done[p].unwrap_or(Rational::ZERO))
                .max()
                .unwrap_or(Rational::ZERO)
        })
        .collect();
    let mut cuts: BTreeSet<Rational> = enabled_at.iter().copied().filter(|&t| t > Rational::ZERO && t < end).collect();
    cuts.insert(Rational::ZERO);
    cuts.insert(end);
    let cuts: Vec<Rational> = cuts.into_iter().collect();
    let blocks = cuts
        .windows(2)
        .map(|w| Block {
            start: w[0],
            end: w[1],
            supported: (0..graph.n()).filter(|&t| enabled_at[t] <= w[0]).collect(),
        })
        .collect();
    SupportedSetBlocks { blocks }
}

/// One line per machine listing its segments in time order. Not a stable format.
pub fn render_gantt(schedule: &Schedule, config: &MachineConfig) -> String {
    let mut out = String::new();
    for machine in 0..config.m() {
        let mut segs: Vec<&Segment> = schedule.segments.iter().filter(|s| s.machine == machine).collect();
        segs.sort_by_key(|s| s.start);
        let _ = write!(out, "M{machine} (c={:>4}) |", config.speed(machine).to_string());
        let mut cursor = Rational::ZERO;
        for seg in segs {
            if seg.start > cursor {
                let _ = write!(out, " idle[{cursor},{}]", seg.start);
            }
            let _ = write!(out, " t{}[{},{}]", seg.task, seg.start, seg.end);
            cursor = seg.end;
        }
        out.push('\n');
    }
    let _ = writeln!(out, "makespan = {}", makespan(schedule));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use proptest::prelude::*;

    fn cfg(values: &[i128]) -> MachineConfig {
        MachineConfig::new(values.iter().map(|&v| Rational::from(v)).collect()).unwrap()
    }

    fn seg(task: TaskId, machine: usize, start: Rational, end: Rational) -> Segment {
        Segment::new(task, machine, start, end)
    }

    #[test]
    fn unit_work_on_fast_machine() {
        let g = TaskGraph::new(1, []).unwrap();
        let s = Schedule::new(vec![seg(0, 0, rat(0, 1), rat(1, 4))]);
        assert_eq!(s.validate(&g, &cfg(&[4])), Ok(()));
    }

    #[test]
    fn too_much_work() {
        let g = TaskGraph::new(1, []).unwrap();
        let s = Schedule::new(vec![seg(0, 0, rat(0, 1), rat(1, 2))]);
        assert_eq!(
            s.validate(&g, &cfg(&[4])),
            Err(ScheduleError::WorkMismatch { task: 0, work: rat(2, 1) })
        );
    }

    #[test]
    fn precedence_violation() {
        let g = TaskGraph::new(2, [(0, 1)]).unwrap();
        let s = Schedule::new(vec![seg(0, 0, rat(0, 1), rat(1, 4)), seg(1, 1, rat(0, 1), rat(1, 1))]);
        assert!(matches!(
            s.validate(&g, &cfg(&[4, 1])),
            Err(ScheduleError::PrecedenceViolation { pred: 0, succ: 1, .. })
        ));
    }

    #[test]
    fn overlaps_detected() {
        let g = TaskGraph::new(2, []).unwrap();
        let machine_clash = Schedule::new(vec![seg(0, 0, rat(0, 1), rat(1, 1)), seg(1, 0, rat(1, 2), rat(3, 2))]);
        assert!(matches!(machine_clash.validate(&g, &cfg(&[1, 1])), Err(ScheduleError::MachineOverlap { machine: 0, .. })));
        let self_clash = Schedule::new(vec![
            seg(0, 0, rat(0, 1), rat(1, 2)),
            seg(0, 1, rat(1, 4), rat(3, 4)),
            seg(1, 0, rat(1, 2), rat(3, 2)),
        ]);
        assert!(matches!(self_clash.validate(&g, &cfg(&[1, 1])), Err(ScheduleError::TaskSelfOverlap { task: 0, .. })));
        let touching = Schedule::new(vec![seg(0, 0, rat(0, 1), rat(1, 1)), seg(1, 0, rat(1, 1), rat(2, 1))]);
        assert_eq!(touching.validate(&g, &cfg(&[1, 1])), Ok(()));
    }

    #[test]
    fn malformed_segments() {
        let g = TaskGraph::new(1, []).unwrap();
        let s = Schedule::new(vec![seg(0, 3, rat(0, 1), rat(1, 1))]);
        assert!(matches!(s.validate(&g, &cfg(&[1])), Err(ScheduleError::InvalidSegment { index: 0, .. })));
        let s = Schedule::new(vec![seg(0, 0, rat(1, 1), rat(1, 1))]);
        assert!(matches!(s.validate(&g, &cfg(&[1])), Err(ScheduleError::InvalidSegment { .. })));
    }

    #[test]
    fn missing_task_is_work_mismatch() {
        let g = TaskGraph::new(2, []).unwrap();
        let s = Schedule::new(vec![seg(0, 0, rat(0, 1), rat(1, 1))]);
        assert_eq!(s.validate(&g, &cfg(&[1])), Err(ScheduleError::WorkMismatch { task: 1, work: rat(0, 1) }));
    }

    #[test]
    fn makespan_of_empty() {
        assert_eq!(Schedule::default().makespan(), Rational::ZERO);
    }

    #[test]
    fn energy_examples() {
        let alpha2 = EnergyParams::new(rat(2, 1)).unwrap();
        let one = Schedule::new(vec![seg(0, 0, rat(0, 1), rat(1, 1))]);
        assert_eq!(one.energy(&cfg(&[2]), &alpha2), Ok(rat(4, 1)));

        let fast = Schedule::new(vec![seg(0, 0, rat(0, 1), rat(1, 2))]);
        let slow = Schedule::new(vec![seg(0, 1, rat(0, 1), rat(1, 1))]);
        assert_eq!(fast.energy(&cfg(&[2, 1]), &alpha2), Ok(rat(2, 1)));
        assert_eq!(slow.energy(&cfg(&[2, 1]), &alpha2), Ok(rat(1, 1)));

        let both = Schedule::new(vec![seg(0, 0, rat(0, 1), rat(1, 2)), seg(1, 0, rat(1, 2), rat(1, 1))]);
        assert_eq!(both.energy(&cfg(&[2]), &alpha2), Ok(rat(4, 1)));
    }

    #[test]
    fn irrational_power_rejected_in_exact_mode() {
        let params = EnergyParams::new(rat(3, 2)).unwrap();
        let s = Schedule::new(vec![seg(0, 0, rat(0, 1), rat(1, 2))]);
        assert!(matches!(s.energy(&cfg(&[2]), &params), Err(EnergyError::NonRepresentablePower { .. })));
        let approx = energy_value(&s, &cfg(&[2]), &params);
        assert!((approx.to_f64() - 2f64.powf(1.5) / 2.0).abs() < 1e-15);
        // 4^(3/2) = 8 is rational, so this one stays exact.
        let s4 = Schedule::new(vec![seg(0, 0, rat(0, 1), rat(1, 4))]);
        assert_eq!(s4.energy(&cfg(&[4]), &params), Ok(rat(2, 1)));
    }

    #[test]
    fn timeline_examples() {
        let s = Schedule::new(vec![seg(0, 0, rat(0, 1), rat(1, 2)), seg(1, 0, rat(1, 2), rat(1, 1))]);
        let tl = build_timeline(&s, 1);
        assert_eq!(tl.breakpoints, vec![rat(0, 1), rat(1, 2), rat(1, 1)]);
        assert_eq!(tl.occupancy, vec![vec![Some(0)], vec![Some(1)]]);
        assert_eq!(build_timeline(&Schedule::default(), 2).breakpoints, vec![rat(0, 1)]);
    }

    #[test]
    fn blocks_examples() {
        let g = TaskGraph::new(2, []).unwrap();
        let par = Schedule::new(vec![seg(0, 0, rat(0, 1), rat(1, 1)), seg(1, 1, rat(0, 1), rat(1, 1))]);
        let b = supported_set_blocks(&par, &g);
        assert_eq!(b.boundaries(), vec![rat(0, 1), rat(1, 1)]);
        assert_eq!(b.blocks[0].supported, vec![0, 1]);

        let chain = TaskGraph::new(2, [(0, 1)]).unwrap();
        let s = Schedule::new(vec![seg(0, 0, rat(0, 1), rat(1, 1)), seg(1, 0, rat(1, 1), rat(2, 1))]);
        let b = supported_set_blocks(&s, &chain);
        assert_eq!(b.boundaries(), vec![rat(0, 1), rat(1, 1), rat(2, 1)]);
        assert_eq!(b.blocks[0].supported, vec![0]);
        assert_eq!(b.blocks[1].supported, vec![0, 1]);

        // chains (2, 1) on speeds (1, 1): a -> b and c
        let g = TaskGraph::new(3, [(0, 1)]).unwrap();
        let s = Schedule::new(vec![
            seg(0, 0, rat(0, 1), rat(1, 1)),
            seg(2, 1, rat(0, 1), rat(1, 1)),
            seg(1, 0, rat(1, 1), rat(2, 1)),
        ]);
        assert_eq!(supported_set_blocks(&s, &g).boundaries(), vec![rat(0, 1), rat(1, 1), rat(2, 1)]);

        assert!(supported_set_blocks(&Schedule::default(), &g).blocks.is_empty());
    }

    #[test]
    fn json_round_trip() {
        let s = Schedule::new(vec![seg(0, 0, rat(0, 1), rat(1, 4))]);
        let text = s.to_json();
        assert!(text.contains("\"end\": \"1/4\""));
        assert_eq!(Schedule::from_json(&text).unwrap(), s);
    }

    #[test]
    fn gantt_lists_every_machine() {
        let s = Schedule::new(vec![seg(0, 1, rat(1, 2), rat(3, 2))]);
        let text = render_gantt(&s, &cfg(&[2, 1]));
        assert_eq!(text.lines().count(), 3);
        assert!(text.contains("idle[0,1/2] t0[1/2,3/2]"));
    }

    /// Random valid schedule: independent tasks placed back to back on random machines.
    fn random_schedule() -> impl Strategy<Value = (Schedule, MachineConfig, TaskGraph)> {
        (1usize..6, proptest::collection::vec(1i128..4, 1..4)).prop_flat_map(|(n, mut speeds)| {
            speeds.sort_unstable_by(|a, b| b.cmp(a));
            let m = speeds.len();
            proptest::collection::vec(0..m, n).prop_map(move |machines| {
                let config = MachineConfig::new(speeds.iter().map(|&v| Rational::from(v)).collect()).unwrap();
                let mut cursor = vec![Rational::ZERO; m];
                let segments = machines
                    .iter()
                    .enumerate()
                    .map(|(task, &k)| {
                        let start = cursor[k];
                        cursor[k] = start + config.speed(k).recip();
                        Segment::new(task, k, start, cursor[k])
                    })
                    .collect();
                (Schedule::new(segments), config, TaskGraph::new(n, []).unwrap())
            })
        })
    }

    proptest! {
        #[test]
        fn splitting_preserves_metrics((s, config, g) in random_schedule(), cut in 1i128..8) {
            let params = EnergyParams::new(rat(2, 1)).unwrap();
            let mut split = Vec::new();
            for seg in &s.segments {
                let mid = seg.start + seg.duration() * Rational::new(cut, 8);
                if mid > seg.start && mid < seg.end {
                    split.push(Segment { end: mid, ..*seg });
                    split.push(Segment { start: mid, ..*seg });
                } else {
                    split.push(*seg);
                }
            }
            let split = Schedule::new(split);
            prop_assert_eq!(split.validate(&g, &config), Ok(()));
            prop_assert_eq!(split.makespan(), s.makespan());
            prop_assert_eq!(split.energy(&config, &params), s.energy(&config, &params));
        }

        #[test]
        fn linear_energy_is_total_work((s, config, g) in random_schedule()) {
            prop_assert_eq!(s.validate(&g, &config), Ok(()));
            let linear = PowerTable::with_exponent(&config, Rational::ONE);
            let total: Rational = s.segments.iter().map(|x| linear.exact(x.machine).unwrap() * x.duration()).sum();
            prop_assert_eq!(total, Rational::from(g.n()));
        }

        #[test]
        fn timeline_size_bound((s, config, _g) in random_schedule()) {
            let tl = build_timeline(&s, config.m());
            prop_assert!(tl.breakpoints.len() <= 2 * s.segments.len() + 1);
            prop_assert!(tl.breakpoints.windows(2).all(|w| w[0] < w[1]));
        }
    }
}
