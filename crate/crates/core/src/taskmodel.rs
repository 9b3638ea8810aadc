//! Task systems, machines and the instance file format.
//!
//! A [`TaskGraph`] is a DAG of unit tasks. A [`ChainSet`] partitions its tasks
//! into directed paths (chains), longest first; edges that join two different
//! chains are kept alongside as cross-chain edges. A [`MachineConfig`] is a
//! non-increasing speed vector, optionally recognised as a two-speed platform
//! with `m_s` fast processors of speed `s > 1` and `m - m_s` processors of
//! speed 1.

use std::collections::{BTreeSet, BinaryHeap};
use std::cmp::Reverse;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::rational::Rational;

pub type TaskId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("precedence graph has a cycle: {}", format_cycle(.cycle))]
    CycleDetected { cycle: Vec<TaskId> },
    #[error("task id {task} out of range for n = {n}")]
    InvalidTaskId { task: TaskId, n: usize },
    #[error("machine set is empty")]
    EmptyMachineSet,
    #[error("speed {speed} of machine {machine} is not positive")]
    NonPositiveSpeed { machine: usize, speed: Rational },
    #[error("speeds must be sorted non-increasingly (machine {machine} is faster than machine {})", .machine - 1)]
    UnsortedSpeeds { machine: usize },
    #[error("energy exponent alpha must exceed 1, got {0}")]
    InvalidAlpha(Rational),
    #[error("invalid chain decomposition: {0}")]
    InvalidChains(String),
    #[error("malformed instance: {0}")]
    Malformed(String),
}

fn format_cycle(cycle: &[TaskId]) -> String {
    let mut parts: Vec<String> = cycle.iter().map(|t| t.to_string()).collect();
    if let Some(first) = cycle.first() {
        parts.push(first.to_string());
    }
    parts.join(" -> ")
}

/// Directed acyclic graph of unit tasks `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskGraph {
    n: usize,
    edges: Vec<(TaskId, TaskId)>,
    preds: Vec<Vec<TaskId>>,
    succs: Vec<Vec<TaskId>>,
    topo: Vec<TaskId>,
}

impl TaskGraph {
    /// Validates the edge set and caches a topological order (smallest id first).
    ///
    /// Duplicate edges collapse; a self-loop is reported as a one-task cycle.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (TaskId, TaskId)>) -> Result<Self, ModelError> {
        let mut edge_set = BTreeSet::new();
        for (u, v) in edges {
            for task in [u, v] {
                if task >= n {
                    return Err(ModelError::InvalidTaskId { task, n });
                }
            }
            if u == v {
                return Err(ModelError::CycleDetected { cycle: vec![u] });
            }
            edge_set.insert((u, v));
        }
        let edges: Vec<_> = edge_set.into_iter().collect();
        let mut preds = vec![Vec::new(); n];
        let mut succs = vec![Vec::new(); n];
        for &(u, v) in &edges {
            succs[u].push(v);
            preds[v].push(u);
        }

        let mut indegree: Vec<usize> = preds.iter().map(Vec::len).collect();
        let mut ready: BinaryHeap<Reverse<TaskId>> =
            (0..n).filter(|&t| indegree[t] == 0).map(Reverse).collect();
        let mut topo = Vec::with_capacity(n);
        while let Some(Reverse(t)) = ready.pop() {
            topo.push(t);
            for &s in &succs[t] {
                indegree[s] -= 1;
                if indegree[s] == 0 {
                    ready.push(Reverse(s));
                }
            }
        }
        if topo.len() < n {
            return Err(ModelError::CycleDetected { cycle: find_cycle(&preds, &indegree) });
        }
        Ok(TaskGraph { n, edges, preds, succs, topo })
    }

    pub fn empty() -> Self {
        TaskGraph::new(0, []).expect("empty graph is valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(TaskId, TaskId)] {
        &self.edges
    }

    pub fn preds(&self, task: TaskId) -> &[TaskId] {
        &self.preds[task]
    }

    pub fn succs(&self, task: TaskId) -> &[TaskId] {
        &self.succs[task]
    }

    pub fn topo_order(&self) -> &[TaskId] {
        &self.topo
    }

    pub fn has_edge(&self, u: TaskId, v: TaskId) -> bool {
        self.edges.binary_search(&(u, v)).is_ok()
    }

    /// Number of tasks on a longest path starting at each task (the task included).
    pub fn tail_lengths(&self) -> Vec<usize> {
        let mut tail = vec![1; self.n];
        for &t in self.topo.iter().rev() {
            for &s in &self.succs[t] {
                tail[t] = tail[t].max(tail[s] + 1);
            }
        }
        tail
    }
}

/// Tasks left over by Kahn's algorithm each keep a remaining predecessor, so
/// walking predecessors must revisit a task.
fn find_cycle(preds: &[Vec<TaskId>], indegree: &[usize]) -> Vec<TaskId> {
    let remaining = |t: TaskId| indegree[t] > 0;
    let start = (0..preds.len()).find(|&t| remaining(t)).expect("cycle exists");
    let mut seen_at = vec![usize::MAX; preds.len()];
    let mut walk = Vec::new();
    let mut current = start;
    while seen_at[current] == usize::MAX {
        seen_at[current] = walk.len();
        walk.push(current);
        current = *preds[current]
            .iter()
            .find(|&&p| remaining(p))
            .expect("remaining task keeps a remaining predecessor");
    }
    let mut cycle = walk[seen_at[current]..].to_vec();
    cycle.reverse();
    // Rotate so the cycle is reported from its smallest task.
    let pos = cycle.iter().enumerate().min_by_key(|(_, &t)| t).map(|(i, _)| i).unwrap_or(0);
    cycle.rotate_left(pos);
    cycle
}

/// Disjoint chains covering every task, sorted so `l_1 >= l_2 >= ... >= l_r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainSet {
    chains: Vec<Vec<TaskId>>,
    cross_edges: Vec<(TaskId, TaskId)>,
    position: Vec<(usize, usize)>,
}

impl ChainSet {
    /// Checks that `chains` partitions the graph's tasks into directed paths and
    /// sorts them by length (stable).
    pub fn from_chains(graph: &TaskGraph, chains: Vec<Vec<TaskId>>) -> Result<Self, ModelError> {
        let n = graph.n();
        let mut seen = vec![false; n];
        for chain in &chains {
            if chain.is_empty() {
                return Err(ModelError::InvalidChains("empty chain".into()));
            }
            for &t in chain {
                if t >= n {
                    return Err(ModelError::InvalidTaskId { task: t, n });
                }
                if std::mem::replace(&mut seen[t], true) {
                    return Err(ModelError::InvalidChains(format!("task {t} appears twice")));
                }
            }
            for pair in chain.windows(2) {
                if !graph.has_edge(pair[0], pair[1]) {
                    return Err(ModelError::InvalidChains(format!(
                        "consecutive tasks {} and {} are not joined by an edge",
                        pair[0], pair[1]
                    )));
                }
            }
        }
        if let Some(t) = seen.iter().position(|&s| !s) {
            return Err(ModelError::InvalidChains(format!("task {t} is not covered")));
        }
        Ok(Self::assemble(graph, chains))
    }

    fn assemble(graph: &TaskGraph, mut chains: Vec<Vec<TaskId>>) -> Self {
        chains.sort_by_key(|c| Reverse(c.len()));
        let mut position = vec![(0, 0); graph.n()];
        for (ci, chain) in chains.iter().enumerate() {
            for (pi, &t) in chain.iter().enumerate() {
                position[t] = (ci, pi);
            }
        }
        let cross_edges = graph
            .edges()
            .iter()
            .copied()
            .filter(|&(u, v)| position[u].0 != position[v].0)
            .collect();
        ChainSet { chains, cross_edges, position }
    }

    pub fn chains(&self) -> &[Vec<TaskId>] {
        &self.chains
    }

    pub fn r(&self) -> usize {
        self.chains.len()
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.chains.iter().map(Vec::len).collect()
    }

    pub fn n(&self) -> usize {
        self.position.len()
    }

    /// Edges of the source graph whose endpoints lie in different chains.
    pub fn cross_edges(&self) -> &[(TaskId, TaskId)] {
        &self.cross_edges
    }

    pub fn has_cross_edges(&self) -> bool {
        !self.cross_edges.is_empty()
    }

    /// `(chain index, position within chain)` of a task.
    pub fn position(&self, task: TaskId) -> (usize, usize) {
        self.position[task]
    }
}

/// Greedy longest-path peeling: repeatedly remove a longest directed path of
/// the remaining graph, choosing the lexicographically smallest one on ties.
pub fn decompose_chains(graph: &TaskGraph) -> ChainSet {
    let n = graph.n();
    let mut removed = vec![false; n];
    let mut left = n;
    let mut chains = Vec::new();
    while left > 0 {
        // Longest remaining path starting at each task, and its smallest-id continuation.
        let mut best_len = vec![0usize; n];
        let mut next = vec![usize::MAX; n];
        for &t in graph.topo_order().iter().rev() {
            if removed[t] {
                continue;
            }
            best_len[t] = 1;
            for &s in graph.succs(t) {
                if !removed[s] && best_len[s] + 1 > best_len[t] {
                    best_len[t] = best_len[s] + 1;
                    next[t] = s;
                }
            }
        }
        let start = (0..n)
            .filter(|&t| !removed[t])
            .max_by_key(|&t| (best_len[t], Reverse(t)))
            .expect("a task remains");
        let mut chain = Vec::with_capacity(best_len[start]);
        let mut current = start;
        loop {
            chain.push(current);
            removed[current] = true;
            if next[current] == usize::MAX {
                break;
            }
            current = next[current];
        }
        left -= chain.len();
        chains.push(chain);
    }
    ChainSet::assemble(graph, chains)
}

/// `(m, m_s, s)`: `m_s` processors of speed `s > 1`, the rest of speed 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TwoSpeedView {
    pub m: usize,
    pub m_s: usize,
    pub s: Rational,
}

impl TwoSpeedView {
    pub fn slow_count(&self) -> usize {
        self.m - self.m_s
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MachineConfig {
    speeds: Vec<Rational>,
    total: Rational,
    two_speed: Option<TwoSpeedView>,
}

impl MachineConfig {
    pub fn new(speeds: Vec<Rational>) -> Result<Self, ModelError> {
        if speeds.is_empty() {
            return Err(ModelError::EmptyMachineSet);
        }
        for (machine, &speed) in speeds.iter().enumerate() {
            if !speed.is_positive() {
                return Err(ModelError::NonPositiveSpeed { machine, speed });
            }
            if machine > 0 && speeds[machine - 1] < speed {
                return Err(ModelError::UnsortedSpeeds { machine });
            }
        }
        let total = speeds.iter().sum();
        let two_speed = recognise_two_speed(&speeds);
        Ok(MachineConfig { speeds, total, two_speed })
    }

    /// `m_s` machines of speed `s` followed by `m - m_s` of speed 1.
    pub fn two_speed(m: usize, m_s: usize, s: Rational) -> Result<Self, ModelError> {
        let mut speeds = vec![s; m_s.min(m)];
        speeds.resize(m, Rational::ONE);
        MachineConfig::new(speeds)
    }

    pub fn uniform(m: usize, speed: Rational) -> Result<Self, ModelError> {
        MachineConfig::new(vec![speed; m])
    }

    pub fn speeds(&self) -> &[Rational] {
        &self.speeds
    }

    pub fn speed(&self, machine: usize) -> Rational {
        self.speeds[machine]
    }

    pub fn m(&self) -> usize {
        self.speeds.len()
    }

    /// Total processing capability `p = sum c(k)`.
    pub fn total_capability(&self) -> Rational {
        self.total
    }

    pub fn average_speed(&self) -> Rational {
        self.total / Rational::from(self.m())
    }

    pub fn view(&self) -> Option<TwoSpeedView> {
        self.two_speed
    }

    pub fn is_symmetric(&self) -> bool {
        self.speeds.first() == self.speeds.last()
    }
}

fn recognise_two_speed(speeds: &[Rational]) -> Option<TwoSpeedView> {
    let s = speeds[0];
    if s <= Rational::ONE {
        return None;
    }
    let m_s = speeds.iter().take_while(|&&c| c == s).count();
    speeds[m_s..]
        .iter()
        .all(|&c| c == Rational::ONE)
        .then_some(TwoSpeedView { m: speeds.len(), m_s, s })
}

/// The two-speed view of a configuration, if its speeds are `{s x m_s, 1 x (m - m_s)}`.
pub fn is_two_speed(config: &MachineConfig) -> Option<TwoSpeedView> {
    config.view()
}

/// Exponent of the convex power model: a machine of speed `c` draws `c^alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnergyParams {
    alpha: Rational,
}

impl EnergyParams {
    pub fn new(alpha: Rational) -> Result<Self, ModelError> {
        if alpha <= Rational::ONE {
            return Err(ModelError::InvalidAlpha(alpha));
        }
        Ok(EnergyParams { alpha })
    }

    pub fn alpha(&self) -> Rational {
        self.alpha
    }
}

/// A task graph, its chain decomposition and the machines it runs on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub graph: TaskGraph,
    pub chains: ChainSet,
    pub config: MachineConfig,
    explicit_chains: bool,
}

/// On-disk instance layout. Speeds are rational strings (`"4"`, `"3/2"`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub n: usize,
    pub edges: Vec<(TaskId, TaskId)>,
    pub speeds: Vec<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chains: Option<Vec<Vec<TaskId>>>,
}

impl Instance {
    /// Builds an instance, decomposing the graph into chains.
    pub fn new(graph: TaskGraph, config: MachineConfig) -> Self {
        let chains = decompose_chains(&graph);
        Instance { graph, chains, config, explicit_chains: false }
    }

    pub fn with_chains(graph: TaskGraph, chains: ChainSet, config: MachineConfig) -> Self {
        Instance { graph, chains, config, explicit_chains: true }
    }

    /// Independent chains of the given lengths; tasks are numbered chain by chain.
    pub fn from_chain_lengths(lengths: &[usize], config: MachineConfig) -> Self {
        let (graph, chains) = chain_graph(lengths);
        let chains = ChainSet::from_chains(&graph, chains).expect("generated chains are valid");
        Instance { graph, chains, config, explicit_chains: true }
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn m(&self) -> usize {
        self.config.m()
    }

    /// Same tasks on a different machine set.
    pub fn with_config(&self, config: MachineConfig) -> Self {
        Instance { config, ..self.clone() }
    }

    pub fn from_file(file: InstanceFile) -> Result<Self, ModelError> {
        let graph = TaskGraph::new(file.n, file.edges)?;
        let config = MachineConfig::new(file.speeds)?;
        Ok(match file.chains {
            Some(chains) => {
                let chains = ChainSet::from_chains(&graph, chains)?;
                Instance::with_chains(graph, chains, config)
            }
            None => Instance::new(graph, config),
        })
    }

    pub fn to_file(&self) -> InstanceFile {
        InstanceFile {
            n: self.graph.n(),
            edges: self.graph.edges().to_vec(),
            speeds: self.config.speeds().to_vec(),
            chains: self.explicit_chains.then(|| self.chains.chains().to_vec()),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let file: InstanceFile =
            serde_json::from_str(text).map_err(|e| ModelError::Malformed(e.to_string()))?;
        Instance::from_file(file)
    }

    /// Canonical JSON: sorted, deduplicated edges and compact formatting.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("instance serialises")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("instance serialises")
    }

    /// Hex SHA-256 of the canonical JSON.
    pub fn digest(&self) -> String {
        let hash = Sha256::digest(self.to_json().as_bytes());
        hash.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Graph made of independent chains with the given lengths.
pub fn chain_graph(lengths: &[usize]) -> (TaskGraph, Vec<Vec<TaskId>>) {
    let mut chains = Vec::with_capacity(lengths.len());
    let mut edges = Vec::new();
    let mut next = 0;
    for &len in lengths {
        let chain: Vec<TaskId> = (next..next + len).collect();
        edges.extend(chain.windows(2).map(|w| (w[0], w[1])));
        next += len;
        chains.push(chain);
    }
    (TaskGraph::new(next, edges).expect("chains are acyclic"), chains)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use proptest::prelude::*;

    fn speeds(values: &[i128]) -> MachineConfig {
        MachineConfig::new(values.iter().map(|&v| Rational::from(v)).collect()).unwrap()
    }

    #[test]
    fn two_node_chain_topo() {
        let g = TaskGraph::new(2, [(0, 1)]).unwrap();
        assert_eq!(g.topo_order(), &[0, 1]);
    }

    #[test]
    fn two_cycle_rejected() {
        let err = TaskGraph::new(2, [(0, 1), (1, 0)]).unwrap_err();
        assert_eq!(err, ModelError::CycleDetected { cycle: vec![0, 1] });
    }

    #[test]
    fn longer_cycle_reported() {
        let err = TaskGraph::new(5, [(0, 1), (1, 2), (2, 3), (3, 1), (3, 4)]).unwrap_err();
        assert_eq!(err, ModelError::CycleDetected { cycle: vec![1, 2, 3] });
        assert_eq!(err.to_string(), "precedence graph has a cycle: 1 -> 2 -> 3 -> 1");
    }

    #[test]
    fn self_loop_and_bad_ids() {
        assert!(matches!(TaskGraph::new(2, [(1, 1)]), Err(ModelError::CycleDetected { .. })));
        assert_eq!(
            TaskGraph::new(2, [(0, 2)]).unwrap_err(),
            ModelError::InvalidTaskId { task: 2, n: 2 }
        );
    }

    #[test]
    fn diamond_is_valid() {
        let g = TaskGraph::new(4, [(0, 1), (0, 2), (1, 3), (2, 3), (0, 1)]).unwrap();
        assert_eq!(g.edges().len(), 4);
        assert_eq!(g.topo_order(), &[0, 1, 2, 3]);
    }

    #[test]
    fn decompose_disjoint_chains() {
        // a->b->c and d->e with a..e = 0..4
        let g = TaskGraph::new(5, [(0, 1), (1, 2), (3, 4)]).unwrap();
        let cs = decompose_chains(&g);
        assert_eq!(cs.chains(), &[vec![0, 1, 2], vec![3, 4]]);
        assert!(!cs.has_cross_edges());
    }

    #[test]
    fn decompose_diamond() {
        let g = TaskGraph::new(4, [(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        let cs = decompose_chains(&g);
        assert_eq!(cs.chains(), &[vec![0, 1, 3], vec![2]]);
        assert_eq!(cs.cross_edges(), &[(0, 2), (2, 3)]);
    }

    #[test]
    fn decompose_empty() {
        assert!(decompose_chains(&TaskGraph::empty()).chains().is_empty());
    }

    #[test]
    fn explicit_chains_validated() {
        let g = TaskGraph::new(3, [(0, 1), (1, 2)]).unwrap();
        assert!(ChainSet::from_chains(&g, vec![vec![0, 2], vec![1]]).is_err());
        assert!(ChainSet::from_chains(&g, vec![vec![0, 1]]).is_err());
        let cs = ChainSet::from_chains(&g, vec![vec![2], vec![0, 1]]).unwrap();
        assert_eq!(cs.lengths(), vec![2, 1]);
        assert_eq!(cs.cross_edges(), &[(1, 2)]);
    }

    #[test]
    fn two_speed_views() {
        assert_eq!(
            is_two_speed(&speeds(&[4, 1, 1])),
            Some(TwoSpeedView { m: 3, m_s: 1, s: rat(4, 1) })
        );
        assert_eq!(
            is_two_speed(&speeds(&[2, 2, 1])),
            Some(TwoSpeedView { m: 3, m_s: 2, s: rat(2, 1) })
        );
        assert_eq!(is_two_speed(&speeds(&[3, 2, 1])), None);
        assert_eq!(is_two_speed(&speeds(&[1, 1])), None);
        assert_eq!(
            is_two_speed(&speeds(&[3])),
            Some(TwoSpeedView { m: 1, m_s: 1, s: rat(3, 1) })
        );
    }

    #[test]
    fn machine_config_errors() {
        assert_eq!(MachineConfig::new(vec![]).unwrap_err(), ModelError::EmptyMachineSet);
        assert!(matches!(
            MachineConfig::new(vec![rat(1, 1), rat(2, 1)]),
            Err(ModelError::UnsortedSpeeds { machine: 1 })
        ));
        assert!(matches!(
            MachineConfig::new(vec![rat(1, 1), rat(0, 1)]),
            Err(ModelError::NonPositiveSpeed { machine: 1, .. })
        ));
        assert_eq!(speeds(&[4, 1, 1]).total_capability(), rat(6, 1));
    }

    #[test]
    fn alpha_must_exceed_one() {
        assert!(EnergyParams::new(rat(1, 1)).is_err());
        assert!(EnergyParams::new(rat(3, 2)).is_ok());
    }

    #[test]
    fn instance_json_round_trip() {
        let text = r#"{"n": 4, "edges": [[0,1],[2,3]], "speeds": ["4","1","1"]}"#;
        let inst = Instance::from_json(text).unwrap();
        assert_eq!(inst.chains.lengths(), vec![2, 2]);
        let again = Instance::from_json(&inst.to_json()).unwrap();
        assert_eq!(again, inst);
        assert_eq!(inst.digest(), again.digest());
        assert_eq!(inst.digest().len(), 64);
    }

    #[test]
    fn instance_json_rejects_garbage() {
        assert!(matches!(Instance::from_json("{"), Err(ModelError::Malformed(_))));
        assert!(matches!(
            Instance::from_json(r#"{"n":1,"edges":[],"speeds":["x"]}"#),
            Err(ModelError::Malformed(_))
        ));
    }

    fn random_dag() -> impl Strategy<Value = TaskGraph> {
        (0usize..12).prop_flat_map(|n| {
            proptest::collection::vec((0..n.max(1), 0..n.max(1)), 0..(2 * n + 1)).prop_map(move |pairs| {
                let edges = pairs.into_iter().filter(|(u, v)| u < v);
                TaskGraph::new(n, edges).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn chains_partition_tasks(g in random_dag()) {
            let cs = decompose_chains(&g);
            let lengths = cs.lengths();
            prop_assert_eq!(lengths.iter().sum::<usize>(), g.n());
            prop_assert!(lengths.windows(2).all(|w| w[0] >= w[1]));
            let mut all: Vec<_> = cs.chains().iter().flatten().copied().collect();
            all.sort();
            prop_assert_eq!(all, (0..g.n()).collect::<Vec<_>>());
            for chain in cs.chains() {
                for w in chain.windows(2) {
                    prop_assert!(g.has_edge(w[0], w[1]));
                }
            }
            // Every edge is either inside a chain (in order) or listed as cross-chain.
            for &(u, v) in g.edges() {
                let (cu, pu) = cs.position(u);
                let (cv, pv) = cs.position(v);
                if cu == cv {
                    prop_assert!(pu < pv);
                } else {
                    prop_assert!(cs.cross_edges().contains(&(u, v)));
                }
            }
        }
    }
}
