use super::{OracleError, OracleLimits};
use crate::bounds::bound_b_general;
use crate::rational::Rational;
use crate::schedule::{Schedule, Segment};
use crate::taskmodel::{Instance, TaskId};

struct Search<'a> {
    instance: &'a Instance,
    speeds: Vec<Rational>,
    durations: Vec<Rational>,
    /// Tasks on the longest path starting at each task (inclusive).
    tail: Vec<usize>,
    fastest: Rational,
    best: Rational,
    best_plan: Vec<(TaskId, usize, Rational)>,
    plan: Vec<(TaskId, usize, Rational)>,
    completion: Vec<Option<Rational>>,
    free: Vec<Rational>,
    nodes: u64,
    /// Tasks that must be placed before each task (symmetry breaking).
    before: Vec<Vec<TaskId>>,
}

/// Interchangeable tasks are placed in index order.
///
/// Without cross-chain edges the graph is a set of disjoint chains and chains
/// of equal length are interchangeable as wholes: the head of a chain waits
/// for the heads of equal-length chains with a lower index. Otherwise two
/// tasks with identical predecessor and successor sets are twins and the
/// higher id waits for the lower.
fn symmetry_order(instance: &Instance) -> Vec<Vec<TaskId>> {
    let n = instance.n();
    let graph = &instance.graph;
    let mut before = vec![Vec::new(); n];
    if !instance.chains.has_cross_edges() {
        let chains = instance.chains.chains();
        for (i, c) in chains.iter().enumerate() {
            if let Some(&head) = c.first() {
                before[head] = chains[..i].iter().filter(|d| d.len() == c.len()).map(|d| d[0]).collect();
            }
        }
    } else {
        let mut sorted_preds: Vec<Vec<TaskId>> = (0..n).map(|t| graph.preds(t).to_vec()).collect();
        let mut sorted_succs: Vec<Vec<TaskId>> = (0..n).map(|t| graph.succs(t).to_vec()).collect();
        sorted_preds.iter_mut().for_each(|v| v.sort_unstable());
        sorted_succs.iter_mut().for_each(|v| v.sort_unstable());
        for t in 0..n {
            before[t] = (0..t).filter(|&u| sorted_preds[u] == sorted_preds[t] && sorted_succs[u] == sorted_succs[t]).collect();
        }
    }
    before
}

impl Search<'_> {
    fn lower_bound(&self, floor: Rational, done_max: Rational) -> Rational {
        let n = self.instance.n();
        let graph = &self.instance.graph;
        let inv = self.fastest.recip();
        let min_free = self.free.iter().copied().min().expect("machines exist").max(floor);

        let mut head = vec![Rational::ZERO; n];
        let mut path = done_max;
        let mut remaining = 0usize;
        for &t in graph.topo_order() {
            if self.completion[t].is_some() {
                continue;
            }
            remaining += 1;
            let mut h = min_free;
            for &p in graph.preds(t) {
                h = h.max(match self.completion[p] {
                    Some(c) => c,
                    None => head[p] + inv,
                });
            }
            head[t] = h;
            path = path.max(h + inv * Rational::from(self.tail[t]));
        }
        if remaining == 0 {
            return path;
        }

        // The `remaining`-th earliest completion slot over all machines.
        let mut slots: Vec<Rational> = Vec::with_capacity(remaining * self.speeds.len());
        for (k, &f) in self.free.iter().enumerate() {
            let mut t = f.max(floor);
            for _ in 0..remaining {
                t += self.durations[k];
                slots.push(t);
            }
        }
        slots.sort_unstable();
        let load = slots[remaining - 1];

        // Remaining parts of the chains are sequential.
        let mut parts: Vec<usize> = self
            .instance
            .chains
            .chains()
            .iter()
            .map(|c| c.iter().filter(|&&t| self.completion[t].is_none()).count())
            .filter(|&l| l > 0)
            .collect();
        parts.sort_unstable_by(|a, b| b.cmp(a));
        let chains = min_free + bound_b_general(&parts, &self.instance.config);

        path.max(load).max(chains)
    }

    fn dfs(&mut self, last: (Rational, TaskId), done_max: Rational, left: usize, limits: &OracleLimits) -> Result<(), OracleError> {
        self.nodes += 1;
        if self.nodes > limits.max_nodes {
            return Err(OracleError::SearchBudgetExceeded { nodes: limits.max_nodes });
        }
        if left == 0 {
            if done_max < self.best {
                self.best = done_max;
                self.best_plan = self.plan.clone();
            }
            return Ok(());
        }
        if self.lower_bound(last.0, done_max) >= self.best {
            return Ok(());
        }
        let graph = &self.instance.graph;
        let m = self.speeds.len();
        let mut children = Vec::new();
        for t in 0..self.instance.n() {
            if self.completion[t].is_some() {
                continue;
            }
            let mut ready = Rational::ZERO;
            let mut blocked = false;
            for &p in graph.preds(t) {
                match self.completion[p] {
                    Some(c) => ready = ready.max(c),
                    None => blocked = true,
                }
            }
            if blocked || self.before[t].iter().any(|&u| self.completion[u].is_none()) {
                continue;
            }
            for k in 0..m {
                // Interchangeable machines: only the first of a kind.
                if (0..k).any(|j| self.speeds[j] == self.speeds[k] && self.free[j] == self.free[k]) {
                    continue;
                }
                let start = ready.max(self.free[k]);
                if (start, t) <= last {
                    continue;
                }
                let end = start + self.durations[k];
                if end >= self.best {
                    continue;
                }
                children.push((end, std::cmp::Reverse(self.tail[t]), t, k, start));
            }
        }
        children.sort();
        for (end, _, t, k, start) in children {
            if end >= self.best {
                continue;
            }
            let saved = self.free[k];
            self.free[k] = end;
            self.completion[t] = Some(end);
            self.plan.push((t, k, start));
            let result = self.dfs((start, t), done_max.max(end), left - 1, limits);
            self.plan.pop();
            self.completion[t] = None;
            self.free[k] = saved;
            result?;
        }
        Ok(())
    }
}

/// Earliest-finish-time greedy: a quick feasible schedule.
pub(super) fn greedy_schedule(instance: &Instance) -> Schedule {
    let n = instance.n();
    let graph = &instance.graph;
    let speeds = instance.config.speeds();
    let mut free = vec![Rational::ZERO; speeds.len()];
    let mut done: Vec<Option<Rational>> = vec![None; n];
    let mut segments = Vec::with_capacity(n);
    let tail = graph.tail_lengths();
    let mut order: Vec<TaskId> = graph.topo_order().to_vec();
    // Topological order refined by longest tail first among ready tasks.
    for _ in 0..n {
        let t = *order
            .iter()
            .filter(|&&t| done[t].is_none() && graph.preds(t).iter().all(|&p| done[p].is_some()))
            .max_by_key(|&&t| (tail[t], std::cmp::Reverse(t)))
            .expect("a ready task exists");
        let ready = graph.preds(t).iter().map(|&p| done[p].unwrap()).max().unwrap_or(Rational::ZERO);
        let (k, start, end) = (0..speeds.len())
            .map(|k| {
                let start = ready.max(free[k]);
                (k, start, start + speeds[k].recip())
            })
            .min_by_key(|&(k, _, end)| (end, k))
            .expect("machines exist");
        free[k] = end;
        done[t] = Some(end);
        segments.push(Segment::new(t, k, start, end));
        order.retain(|&x| x != t);
    }
    Schedule::new(segments).canonical()
}

/// Minimum makespan over all non-preemptive schedules, with a witness.
pub fn exact_optimal_schedule(instance: &Instance, limits: &OracleLimits) -> Result<(Rational, Schedule), OracleError> {
    let n = instance.n();
    let m = instance.m();
    if n > limits.max_tasks || m > limits.max_machines {
        return Err(OracleError::SizeLimitExceeded { n, m });
    }
    let greedy = greedy_schedule(instance);
    if n == 0 {
        return Ok((Rational::ZERO, greedy));
    }
    let speeds = instance.config.speeds().to_vec();
    let durations = speeds.iter().map(|s| s.recip()).collect();
    let fastest = speeds[0];
    let mut search = Search {
        instance,
        tail: instance.graph.tail_lengths(),
        speeds,
        durations,
        fastest,
        best: greedy.makespan(),
        best_plan: Vec::new(),
        plan: Vec::with_capacity(n),
        completion: vec![None; n],
        free: vec![Rational::ZERO; m],
        nodes: 0,
        before: symmetry_order(instance),
    };
    let root = search.lower_bound(Rational::ZERO, Rational::ZERO);
    if root < search.best {
        // Any start time is >= 0 and task ids are >= 0, so (-1, 0) precedes everything.
        search.dfs((-Rational::ONE, 0), Rational::ZERO, n, limits)?;
    }
    if search.best_plan.is_empty() {
        return Ok((search.best, greedy));
    }
    let segments = search
        .best_plan
        .iter()
        .map(|&(t, k, start)| Segment::new(t, k, start, start + instance.config.speed(k).recip()))
        .collect();
    Ok((search.best, Schedule::new(segments).canonical()))
}

pub fn exact_optimal_makespan(instance: &Instance, limits: &OracleLimits) -> Result<Rational, OracleError> {
    exact_optimal_schedule(instance, limits).map(|(t, _)| t)
}
