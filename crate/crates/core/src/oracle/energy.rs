use num_rational::BigRational;
use num_traits::Zero;

use super::{OracleError, EnergyLimits};
use crate::rational::Rational;
use crate::schedule::PowerTable;
use crate::simplex::{LinearProgram, Relation, SimplexError};
use crate::taskmodel::{EnergyParams, Instance, TaskGraph, TaskId};

/// Every topological order of the graph.
fn linear_extensions(graph: &TaskGraph) -> Vec<Vec<TaskId>> {
    fn extend(graph: &TaskGraph, prefix: &mut Vec<TaskId>, placed: &mut [bool], out: &mut Vec<Vec<TaskId>>) {
        if prefix.len() == placed.len() {
            out.push(prefix.clone());
            return;
        }
        for t in 0..placed.len() {
            if placed[t] || graph.preds(t).iter().any(|&p| !placed[p]) {
                continue;
            }
            placed[t] = true;
            prefix.push(t);
            extend(graph, prefix, placed, out);
            prefix.pop();
            placed[t] = false;
        }
    }
    let mut out = Vec::new();
    extend(graph, &mut Vec::new(), &mut vec![false; graph.n()], &mut out);
    out
}

/// Minimum energy of a preemptive schedule whose tasks complete in `order`.
///
/// Phase `p` ends when `order[p]` completes. Inside a phase a task that is
/// enabled and unfinished may run on any machine; per-phase machine loads and
/// per-task times bounded by the phase length are realisable by a preemptive
/// open-shop schedule of that length.
fn order_energy(instance: &Instance, order: &[TaskId], power: &[BigRational], cap: &BigRational) -> Result<Option<BigRational>, OracleError> {
    let n = instance.n();
    let m = instance.m();
    let graph = &instance.graph;
    let mut position = vec![0; n];
    for (p, &t) in order.iter().enumerate() {
        position[t] = p;
    }
    // Phase in which each task becomes enabled.
    let enabled: Vec<usize> = (0..n)
        .map(|t| graph.preds(t).iter().map(|&q| position[q] + 1).max().unwrap_or(0))
        .collect();

    let mut vars: Vec<(TaskId, usize, usize)> = Vec::new();
    for t in 0..n {
        for p in enabled[t]..=position[t] {
            for k in 0..m {
                vars.push((t, k, p));
            }
        }
    }
    let len = |p: usize| vars.len() + p;
    let mut lp = LinearProgram::new(vars.len() + n);
    lp.objective = vars.iter().enumerate().map(|(i, &(_, k, _))| (i, power[k].clone())).collect();

    let one = BigRational::from_integer(1.into());
    for p in 0..n {
        for k in 0..m {
            let mut row: Vec<_> = vars.iter().enumerate().filter(|(_, v)| v.1 == k && v.2 == p).map(|(i, _)| (i, one.clone())).collect();
            if !row.is_empty() {
                row.push((len(p), -one.clone()));
                lp.add(row, Relation::Le, BigRational::zero());
            }
        }
        for t in 0..n {
            let mut row: Vec<_> = vars.iter().enumerate().filter(|(_, v)| v.0 == t && v.2 == p).map(|(i, _)| (i, one.clone())).collect();
            if row.len() > 1 {
                row.push((len(p), -one.clone()));
                lp.add(row, Relation::Le, BigRational::zero());
            }
        }
    }
    let speeds: Vec<BigRational> = instance.config.speeds().iter().map(|s| s.to_big()).collect();
    for t in 0..n {
        let row = vars.iter().enumerate().filter(|(_, v)| v.0 == t).map(|(i, v)| (i, speeds[v.1].clone())).collect();
        lp.add(row, Relation::Eq, one.clone());
    }
    lp.add((0..n).map(|p| (len(p), one.clone())).collect(), Relation::Le, cap.clone());

    match lp.solve() {
        Ok(opt) => Ok(Some(opt.objective)),
        Err(SimplexError::Infeasible) => Ok(None),
        Err(e) => unreachable!("bounded energy program failed: {e}"),
    }
}

/// Minimum energy over all valid preemptive schedules with makespan at most
/// `cap`, solved exactly as one small LP per completion order.
pub fn exhaustive_min_energy(instance: &Instance, params: &EnergyParams, cap: Rational, limits: &EnergyLimits) -> Result<Rational, OracleError> {
    let n = instance.n();
    let m = instance.m();
    if n > limits.max_tasks || m > limits.max_machines {
        return Err(OracleError::SizeLimitExceeded { n, m });
    }
    let table = PowerTable::new(&instance.config, params);
    let power = (0..m)
        .map(|k| table.exact(k).map(|p| p.to_big()))
        .collect::<Option<Vec<_>>>()
        .ok_or(OracleError::NonRationalPower { alpha: params.alpha() })?;
    if n == 0 {
        return Ok(Rational::ZERO);
    }
    let cap = cap.to_big();
    let mut best: Option<BigRational> = None;
    for order in linear_extensions(&instance.graph) {
        if let Some(e) = order_energy(instance, &order, &power, &cap)? {
            if best.as_ref().is_none_or(|b| e < *b) {
                best = Some(e);
            }
        }
    }
    let best = best.ok_or(OracleError::CapInfeasible)?;
    Rational::from_big(&best).ok_or(OracleError::Overflow)
}
