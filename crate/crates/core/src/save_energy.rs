//! Preemptive energy post-processing.
//!
//! Work is moved from a processor of speed `c(u)` into idle time (a hole) on
//! a strictly slower processor `c(v)`. Under power `c^alpha` this always saves
//! `w (c(u)^(alpha-1) - c(v)^(alpha-1))` for `w` units of work. Moves stay
//! inside windows where the supported set is constant, so precedence and the
//! makespan are preserved, and a piece never overlaps another piece of the
//! same task. Three shapes exist:
//!
//! * exact fit: the whole piece fills the hole;
//! * slack fit: the whole piece fits with room to spare and is placed at the
//!   start of the hole;
//! * partial fit: the piece does not fit, so part of its work fills the hole
//!   and the source piece loses its tail (hole after it) or its head (hole
//!   before it). When the hole reaches into the piece's own interval the cut
//!   point is where the freed time exactly accommodates the moved work.

use std::collections::{BTreeSet, HashSet};

use num_rational::BigRational;
use num_traits::Signed;

use crate::power::{pow_value, EnergyValue};
use crate::rational::Rational;
use crate::schedule::{supported_set_blocks, Block, PowerTable, Schedule, Segment};
use crate::taskmodel::{EnergyParams, MachineConfig, TaskGraph};

/// Upper bound on applied moves per call; a safety net, not a tuning knob.
const MAX_MOVES: usize = 50_000;
const MAX_RESTARTS: usize = 64;

/// Idle time on one machine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Hole {
    pub machine: usize,
    pub start: Rational,
    pub end: Rational,
    pub speed: Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FitKind {
    Exact,
    Slack,
    Partial,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoveCandidate {
    pub source: Segment,
    pub target: Hole,
    pub kind: FitKind,
    pub moved_work: Rational,
    /// The new piece on the slower machine.
    pub placed: Segment,
    /// What is left of the source after a partial fit.
    pub remainder: Option<Segment>,
    /// Negative: energy saved.
    pub energy_delta: EnergyValue,
}

/// `(1/alpha)^(1/(alpha-1)) * c_u`, the speed maximising the saving of a
/// hole of fixed length. Exact when the root is rational.
pub fn optimal_target_speed(c_u: Rational, params: &EnergyParams) -> EnergyValue {
    let alpha = params.alpha();
    pow_value(alpha.recip(), (alpha - Rational::ONE).recip()).scale(c_u)
}

/// Energy saved by filling a hole of length `t_j` at speed `c_v` with work
/// taken from speed `c_u`: `c_v t_j (c_u^(alpha-1) - c_v^(alpha-1))`.
pub fn hole_saving(c_u: Rational, c_v: Rational, t_j: Rational, params: &EnergyParams) -> EnergyValue {
    let exp = params.alpha() - Rational::ONE;
    (pow_value(c_u, exp) - pow_value(c_v, exp)).scale(c_v * t_j)
}

fn distance(speed: Rational, target: &EnergyValue) -> BigRational {
    (speed.to_big() - target.to_big_rational()).abs()
}

/// The candidate speed closest to the target, ties toward the slower one.
pub fn closest_to_target(c_u: Rational, candidates: &[Rational], params: &EnergyParams) -> Option<Rational> {
    let target = optimal_target_speed(c_u, params);
    candidates.iter().copied().min_by(|a, b| distance(*a, &target).cmp(&distance(*b, &target)).then(a.cmp(b)))
}

fn split_at(segments: &[Segment], cuts: &[Rational]) -> Vec<Segment> {
    let mut out = Vec::with_capacity(segments.len());
    for seg in segments {
        let mut start = seg.start;
        for &cut in cuts.iter().filter(|&&c| c > seg.start && c < seg.end) {
            out.push(Segment::new(seg.task, seg.machine, start, cut));
            start = cut;
        }
        out.push(Segment::new(seg.task, seg.machine, start, seg.end));
    }
    out
}

/// Parts of `[lo, hi]` not covered by `busy`.
fn complement(mut busy: Vec<(Rational, Rational)>, lo: Rational, hi: Rational) -> Vec<(Rational, Rational)> {
    busy.sort();
    let mut out = Vec::new();
    let mut cursor = lo;
    for (s, e) in busy {
        if s > cursor {
            out.push((cursor, s.min(hi)));
        }
        cursor = cursor.max(e);
        if cursor >= hi {
            break;
        }
    }
    if cursor < hi {
        out.push((cursor, hi));
    }
    out.retain(|(s, e)| s < e);
    out
}

/// `windows` minus the union of `remove`.
fn subtract(windows: &[(Rational, Rational)], remove: &[(Rational, Rational)]) -> Vec<(Rational, Rational)> {
    let mut out = Vec::new();
    for &(lo, hi) in windows {
        let inside: Vec<_> = remove.iter().copied().filter(|&(s, e)| s < hi && e > lo).collect();
        out.extend(complement(inside, lo, hi));
    }
    out
}

/// Partial fits of `src` (speed `c_u`) into the window `[x, y]` of a slower
/// machine that cannot take all of it.
///
/// A window clear of the source's interval is filled and the source loses its
/// tail. A window reaching into that interval from the right (left) takes the
/// source's tail (head), and the cut point is
/// chosen so that the freed time is exactly what the placed piece needs:
/// `c_u (b - b') = c_v (y - b')`, the limit of repeatedly refilling the
/// freed sliver.
fn partial_fits(src: Segment, c_u: Rational, v: usize, c_v: Rational, x: Rational, y: Rational) -> Vec<(Segment, Segment)> {
    let (a, b) = (src.start, src.end);
    let mut out = Vec::new();
    if y <= a || x >= b {
        let cut = b - c_v * (y - x) / c_u;
        out.push((Segment::new(src.task, v, x, y), Segment::new(src.task, src.machine, a, cut)));
        return out;
    }
    if y > b {
        let cut = b - c_v * (y - x) / c_u;
        let (cut, from) = if cut <= x {
            (cut, x)
        } else {
            let balanced = (c_u * b - c_v * y) / (c_u - c_v);
            (balanced, balanced)
        };
        if cut > a && from < y {
            out.push((Segment::new(src.task, v, from, y), Segment::new(src.task, src.machine, a, cut)));
        }
    }
    if x < a {
        let cut = a + c_v * (y - x) / c_u;
        let (cut, to) = if cut >= y {
            (cut, y)
        } else {
            let balanced = (c_u * a - c_v * x) / (c_u - c_v);
            (balanced, balanced)
        };
        if cut < b && x < to {
            out.push((Segment::new(src.task, v, x, to), Segment::new(src.task, src.machine, cut, b)));
        }
    }
    out
}

struct Context<'a> {
    config: &'a MachineConfig,
    /// `c(k)^(alpha - 1)`.
    rates: PowerTable,
}

impl<'a> Context<'a> {
    fn new(config: &'a MachineConfig, params: &EnergyParams) -> Self {
        Context { config, rates: PowerTable::with_exponent(config, params.alpha() - Rational::ONE) }
    }

    /// Every move of `pieces[index]` onto machine `v`, restricted to `[lo, hi]`.
    fn moves(&self, pieces: &[Segment], index: usize, v: usize, lo: Rational, hi: Rational) -> Vec<MoveCandidate> {
        let src = pieces[index];
        let c_u = self.config.speed(src.machine);
        let c_v = self.config.speed(v);
        debug_assert!(c_v < c_u);
        let busy: Vec<_> = pieces.iter().filter(|p| p.machine == v).map(|p| (p.start, p.end)).collect();
        let own: Vec<_> = pieces
            .iter()
            .enumerate()
            .filter(|&(i, p)| i != index && p.task == src.task)
            .map(|(_, p)| (p.start, p.end))
            .collect();
        let holes = complement(busy, lo, hi);
        let windows = subtract(&holes, &own);
        let work = src.duration() * c_u;
        let delta_rate = self.rates.value(v) - self.rates.value(src.machine);
        let hole_of = |(start, end): (Rational, Rational)| Hole { machine: v, start, end, speed: c_v };
        let mut out = Vec::new();
        for &(x, y) in &windows {
            let capacity = (y - x) * c_v;
            if capacity >= work {
                out.push(MoveCandidate {
                    source: src,
                    target: hole_of((x, y)),
                    kind: if capacity == work { FitKind::Exact } else { FitKind::Slack },
                    moved_work: work,
                    placed: Segment::new(src.task, v, x, x + work / c_v),
                    remainder: None,
                    energy_delta: delta_rate.scale(work),
                });
            }
        }
        for &(x, y) in &windows {
            if (y - x) * c_v >= work {
                continue;
            }
            for (placed, rest) in partial_fits(src, c_u, v, c_v, x, y) {
                let moved = placed.duration() * c_v;
                out.push(MoveCandidate {
                    source: src,
                    target: hole_of((x, y)),
                    kind: FitKind::Partial,
                    moved_work: moved,
                    placed,
                    remainder: Some(rest),
                    energy_delta: delta_rate.scale(moved),
                });
            }
        }
        out
    }

    /// All moves inside `[lo, hi]`; `pieces` must already be cut at both ends.
    fn block_moves(&self, pieces: &[Segment], lo: Rational, hi: Rational) -> Vec<MoveCandidate> {
        let mut order: Vec<usize> = (0..pieces.len()).filter(|&i| pieces[i].start >= lo && pieces[i].end <= hi).collect();
        order.sort_by_key(|&i| (pieces[i].start, pieces[i].machine));
        let inside: Vec<Segment> = order.iter().map(|&i| pieces[i]).collect();
        let mut out = Vec::new();
        for index in 0..inside.len() {
            let c_u = self.config.speed(inside[index].machine);
            for v in 0..self.config.m() {
                if self.config.speed(v) < c_u {
                    out.extend(self.moves(&inside, index, v, lo, hi));
                }
            }
        }
        out
    }
}

/// Every admissible single move within `block`.
pub fn enumerate_moves(schedule: &Schedule, config: &MachineConfig, params: &EnergyParams, block: &Block) -> Vec<MoveCandidate> {
    let pieces = split_at(&schedule.segments, &[block.start, block.end]);
    Context::new(config, params).block_moves(&pieces, block.start, block.end)
}

/// `Ok` when no block admits an energy-reducing move; otherwise the first
/// such move found (blocks in time order).
pub fn verify_local_optimality(
    schedule: &Schedule,
    graph: &TaskGraph,
    config: &MachineConfig,
    params: &EnergyParams,
) -> Result<(), Box<MoveCandidate>> {
    let ctx = Context::new(config, params);
    let blocks = supported_set_blocks(schedule, graph);
    let pieces = split_at(&schedule.segments, &blocks.boundaries());
    for block in &blocks.blocks {
        if let Some(candidate) = ctx.block_moves(&pieces, block.start, block.end).into_iter().next() {
            return Err(Box::new(candidate));
        }
    }
    Ok(())
}

fn apply(pieces: &mut Vec<Segment>, mv: &MoveCandidate, cuts: &[Rational]) {
    let at = pieces.iter().position(|p| *p == mv.source).expect("source piece exists");
    pieces.swap_remove(at);
    pieces.push(mv.placed);
    if let Some(rest) = mv.remainder {
        pieces.push(rest);
    }
    let mut merged = Schedule::new(std::mem::take(pieces));
    merged.coalesce();
    *pieces = split_at(&merged.segments, cuts);
}

/// Picks the move of the earliest source piece that has one: whole-piece
/// fits first, then the target speed closest to the energy-optimal one
/// (slower on ties), then the earliest hole.
fn choose(ctx: &Context<'_>, params: &EnergyParams, candidates: Vec<MoveCandidate>) -> Option<MoveCandidate> {
    let first = candidates.first()?.source;
    let target = optimal_target_speed(ctx.config.speed(first.machine), params);
    candidates.into_iter().filter(|c| c.source == first).min_by(|a, b| {
        let partial = |c: &MoveCandidate| c.kind == FitKind::Partial;
        partial(a)
            .cmp(&partial(b))
            .then_with(|| distance(a.target.speed, &target).cmp(&distance(b.target.speed, &target)))
            .then_with(|| a.target.speed.cmp(&b.target.speed))
            .then_with(|| (a.placed.start, a.placed.machine).cmp(&(b.placed.start, b.placed.machine)))
    })
}

/// Moves work onto slower processors until no block admits a move.
///
/// Blocks are processed left to right. Within a block, passes admit target
/// speeds down to `c(2)`, then `c(3)`, and so on; in each pass a piece is
/// split by a partial fit at most once. If the result is not a fixed point
/// under its own (possibly coarser) blocks, the passes run again.
pub fn save_energy(schedule: &Schedule, graph: &TaskGraph, config: &MachineConfig, params: &EnergyParams) -> Schedule {
    let ctx = Context::new(config, params);
    let floors: Vec<Rational> = {
        let distinct: BTreeSet<Rational> = config.speeds().iter().copied().collect();
        distinct.into_iter().rev().skip(1).collect()
    };
    let mut current = schedule.clone();
    current.coalesce();
    let mut applied = 0;
    for _ in 0..MAX_RESTARTS {
        let blocks = supported_set_blocks(&current, graph);
        let cuts = blocks.boundaries();
        let mut pieces = split_at(&current.segments, &cuts);
        for block in &blocks.blocks {
            for &floor in &floors {
                let mut split: HashSet<Segment> = HashSet::new();
                while applied < MAX_MOVES {
                    let candidates: Vec<MoveCandidate> = ctx
                        .block_moves(&pieces, block.start, block.end)
                        .into_iter()
                        .filter(|c| c.target.speed >= floor)
                        .filter(|c| c.kind != FitKind::Partial || !split.contains(&c.source))
                        .collect();
                    let Some(mv) = choose(&ctx, params, candidates) else { break };
                    if let Some(rest) = mv.remainder {
                        split.insert(rest);
                    }
                    apply(&mut pieces, &mv, &cuts);
                    applied += 1;
                }
            }
        }
        current = Schedule::new(pieces);
        current.coalesce();
        if applied >= MAX_MOVES || verify_local_optimality(&current, graph, config, params).is_ok() {
            break;
        }
    }
    current
}
