use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use super::LpError;
use crate::rational::Rational;
use crate::simplex::{LinearProgram, Relation};
use crate::taskmodel::{ChainSet, Instance, TaskId, TwoSpeedView};

/// Variables of the speed-assignment program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    X(TaskId),
    Y(TaskId),
    T(TaskId),
    D,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RowKind {
    /// `x_j + y_j = 1`.
    Assignment(TaskId),
    /// `sum x_j <= m_s s D`.
    FastCapacity,
    /// `sum y_j <= (m - m_s) D`.
    SlowCapacity,
    /// `x_j / s + y_j <= t_j - t_pred`.
    Edge { pred: TaskId, succ: TaskId },
    /// `x_j / s + y_j <= t_j` for a task without predecessors.
    Root(TaskId),
    /// `t_j <= D`.
    Deadline(TaskId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MipRow {
    pub kind: RowKind,
    pub terms: Vec<(Var, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// `min D` over `x, y in {0, 1}`, `t >= 0`. The capacity rows are kept in
/// multiplied-out form so that `m = m_s` forces every `y_j` to zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MipProgram {
    pub n: usize,
    pub view: TwoSpeedView,
    pub rows: Vec<MipRow>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct RowCounts {
    pub assignment: usize,
    pub capacity: usize,
    pub edge: usize,
    pub root: usize,
    pub deadline: usize,
}

/// Builds the program for any DAG of unit tasks on a two-speed platform.
/// Precedence rows cover immediate predecessors only.
pub fn build_mip(instance: &Instance) -> Result<MipProgram, LpError> {
    let view = instance.config.view().ok_or(LpError::NotTwoSpeed)?;
    let n = instance.n();
    let graph = &instance.graph;
    let one = Rational::ONE;
    let inv_s = view.s.recip();
    let mut rows = Vec::new();
    for j in 0..n {
        rows.push(MipRow {
            kind: RowKind::Assignment(j),
            terms: vec![(Var::X(j), one), (Var::Y(j), one)],
            relation: Relation::Eq,
            rhs: one,
        });
    }
    let mut fast: Vec<(Var, Rational)> = (0..n).map(|j| (Var::X(j), one)).collect();
    fast.push((Var::D, -(Rational::from(view.m_s) * view.s)));
    rows.push(MipRow { kind: RowKind::FastCapacity, terms: fast, relation: Relation::Le, rhs: Rational::ZERO });
    let mut slow: Vec<(Var, Rational)> = (0..n).map(|j| (Var::Y(j), one)).collect();
    slow.push((Var::D, -Rational::from(view.slow_count())));
    rows.push(MipRow { kind: RowKind::SlowCapacity, terms: slow, relation: Relation::Le, rhs: Rational::ZERO });
    for &j in graph.topo_order() {
        let duration = [(Var::X(j), inv_s), (Var::Y(j), one), (Var::T(j), -one)];
        if graph.preds(j).is_empty() {
            rows.push(MipRow { kind: RowKind::Root(j), terms: duration.to_vec(), relation: Relation::Le, rhs: Rational::ZERO });
        }
        for &p in graph.preds(j) {
            let mut terms = duration.to_vec();
            terms.push((Var::T(p), one));
            rows.push(MipRow { kind: RowKind::Edge { pred: p, succ: j }, terms, relation: Relation::Le, rhs: Rational::ZERO });
        }
    }
    for j in 0..n {
        rows.push(MipRow {
            kind: RowKind::Deadline(j),
            terms: vec![(Var::T(j), one), (Var::D, -one)],
            relation: Relation::Le,
            rhs: Rational::ZERO,
        });
    }
    Ok(MipProgram { n, view, rows })
}

impl MipProgram {
    pub fn counts(&self) -> RowCounts {
        let mut c = RowCounts::default();
        for row in &self.rows {
            match row.kind {
                RowKind::Assignment(_) => c.assignment += 1,
                RowKind::FastCapacity | RowKind::SlowCapacity => c.capacity += 1,
                RowKind::Edge { .. } => c.edge += 1,
                RowKind::Root(_) => c.root += 1,
                RowKind::Deadline(_) => c.deadline += 1,
            }
        }
        c
    }

    fn index(&self, var: Var) -> usize {
        match var {
            Var::X(j) => j,
            Var::Y(j) => self.n + j,
            Var::T(j) => 2 * self.n + j,
            Var::D => 3 * self.n,
        }
    }

    /// The relaxation with `0 <= x_j, y_j <= 1` (implied by the assignment rows).
    pub fn relaxation(&self) -> LinearProgram {
        let mut lp = LinearProgram::new(3 * self.n + 1);
        lp.objective = vec![(self.index(Var::D), BigRational::from_integer(1.into()))];
        for row in &self.rows {
            let coeffs = row.terms.iter().map(|&(v, c)| (self.index(v), c.to_big())).collect();
            lp.add(coeffs, row.relation, row.rhs.to_big());
        }
        lp
    }

    fn value(&self, solution: &LpSolution, var: Var) -> Rational {
        match var {
            Var::X(j) => solution.x[j],
            Var::Y(j) => Rational::ONE - solution.x[j],
            Var::T(j) => solution.t[j],
            Var::D => solution.d,
        }
    }

    /// First row (or bound) the solution violates, if any.
    pub fn check(&self, solution: &LpSolution) -> Result<(), String> {
        if solution.x.len() != self.n || solution.t.len() != self.n {
            return Err("solution has the wrong number of tasks".into());
        }
        for j in 0..self.n {
            let x = solution.x[j];
            if x.is_negative() || x > Rational::ONE {
                return Err(format!("x_{j} = {x} outside [0, 1]"));
            }
            if solution.t[j].is_negative() {
                return Err(format!("t_{j} is negative"));
            }
        }
        for row in &self.rows {
            let lhs: Rational = row.terms.iter().map(|&(v, c)| c * self.value(solution, v)).sum();
            let ok = match row.relation {
                Relation::Le => lhs <= row.rhs,
                Relation::Ge => lhs >= row.rhs,
                Relation::Eq => lhs == row.rhs,
            };
            if !ok {
                return Err(format!("{:?} violated: {lhs} vs {}", row.kind, row.rhs));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X(j) => write!(f, "x{j}"),
            Var::Y(j) => write!(f, "y{j}"),
            Var::T(j) => write!(f, "t{j}"),
            Var::D => write!(f, "D"),
        }
    }
}

impl fmt::Display for MipProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "min D")?;
        for row in &self.rows {
            let terms: Vec<String> = row.terms.iter().map(|(v, c)| format!("{c}*{v}")).collect();
            let rel = match row.relation {
                Relation::Le => "<=",
                Relation::Ge => ">=",
                Relation::Eq => "=",
            };
            writeln!(f, "  {} {rel} {}", terms.join(" + "), row.rhs)?;
        }
        Ok(())
    }
}

/// Optimal fractional solution. `y_j = 1 - x_j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LpSolution {
    pub x: Vec<Rational>,
    pub t: Vec<Rational>,
    pub d: Rational,
    /// Per-chain value when the chain-reduced program was solved.
    pub chain_x: Option<Vec<Rational>>,
}

impl LpSolution {
    /// Per-chain `x`: the reduced value when known, the chain average otherwise.
    pub fn chain_values(&self, chains: &ChainSet) -> Vec<Rational> {
        if let Some(values) = &self.chain_x {
            return values.clone();
        }
        chains
            .chains()
            .iter()
            .map(|c| c.iter().map(|&j| self.x[j]).sum::<Rational>() / Rational::from(c.len()))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LpOptions {
    /// Largest number of tasks the exact solver accepts.
    pub max_tasks: usize,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions { max_tasks: 200 }
    }
}

fn to_rational(value: &BigRational) -> Result<Rational, LpError> {
    Rational::from_big(value).ok_or(LpError::Overflow)
}

/// Solves the relaxation of the full program exactly.
pub fn solve_lp(program: &MipProgram, options: &LpOptions) -> Result<LpSolution, LpError> {
    if program.n > options.max_tasks {
        return Err(LpError::SizeLimitExceeded { n: program.n, limit: options.max_tasks });
    }
    let optimum = program.relaxation().solve()?;
    let n = program.n;
    let x = optimum.values[..n].iter().map(to_rational).collect::<Result<_, _>>()?;
    let t = optimum.values[2 * n..3 * n].iter().map(to_rational).collect::<Result<_, _>>()?;
    let d = to_rational(&optimum.values[3 * n])?;
    Ok(LpSolution { x, t, d, chain_x: None })
}

/// Solves the program with one `x_i` per chain, then expands it to tasks
/// (`t_j` is the running chain time).
pub fn solve_chain_lp(instance: &Instance, options: &LpOptions) -> Result<LpSolution, LpError> {
    let view = instance.config.view().ok_or(LpError::NotTwoSpeed)?;
    let chains = &instance.chains;
    if chains.has_cross_edges() {
        return Err(LpError::NotChains);
    }
    let n = instance.n();
    if n > options.max_tasks {
        return Err(LpError::SizeLimitExceeded { n, limit: options.max_tasks });
    }
    let r = chains.r();
    let d = r;
    let big = |q: Rational| q.to_big();
    let mut lp = LinearProgram::new(r + 1);
    lp.objective = vec![(d, big(Rational::ONE))];
    let lengths = chains.lengths();
    let len = |i: usize| Rational::from(lengths[i]);
    let mut fast: Vec<_> = (0..r).map(|i| (i, big(len(i)))).collect();
    fast.push((d, big(-(Rational::from(view.m_s) * view.s))));
    lp.add(fast, Relation::Le, BigRational::zero());
    let mut slow: Vec<_> = (0..r).map(|i| (i, big(-len(i)))).collect();
    slow.push((d, big(-Rational::from(view.slow_count()))));
    lp.add(slow, Relation::Le, big(-Rational::from(n)));
    let gain = view.s.recip() - Rational::ONE;
    for i in 0..r {
        lp.add(vec![(i, big(len(i) * gain)), (d, big(-Rational::ONE))], Relation::Le, big(-len(i)));
        lp.add(vec![(i, big(Rational::ONE))], Relation::Le, big(Rational::ONE));
    }
    let optimum = lp.solve()?;
    let chain_x: Vec<Rational> = optimum.values[..r].iter().map(to_rational).collect::<Result<_, _>>()?;
    let d_bar = to_rational(&optimum.values[d])?;
    let mut x = vec![Rational::ZERO; n];
    let mut t = vec![Rational::ZERO; n];
    for (i, chain) in chains.chains().iter().enumerate() {
        let step = chain_x[i] / view.s + Rational::ONE - chain_x[i];
        let mut clock = Rational::ZERO;
        for &j in chain {
            clock += step;
            x[j] = chain_x[i];
            t[j] = clock;
        }
    }
    Ok(LpSolution { x, t, d: d_bar, chain_x: Some(chain_x) })
}

/// Chain-reduced program for chain collections, full program otherwise.
pub fn solve_instance_lp(instance: &Instance, options: &LpOptions) -> Result<LpSolution, LpError> {
    if instance.chains.has_cross_edges() {
        solve_lp(&build_mip(instance)?, options)
    } else {
        solve_chain_lp(instance, options)
    }
}
