//! Instance generation, algorithm dispatch and CSV benchmark reports.
//!
//! Everything here is deterministic for fixed seeds: generators draw from a
//! seeded ChaCha stream, corpus rows are ordered by sorted instance path and
//! wall time is only reported on request.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{bound_report, list_bound_quantities, BoundReport};
use crate::lprelax::{deterministic_rounding, rounding_pipeline, solve_instance_lp, speed_based_list_schedule};
use crate::lprelax::{default_trials, LpError, LpOptions, PipelineReport, RoundingConfig, TrialRecord};
use crate::oracle::{exact_optimal_schedule, OracleError, OracleLimits};
use crate::power::EnergyValue;
use crate::rational::Rational;
use crate::remnants::{remnants_schedule, RemnantsError, RoundTrace};
use crate::save_energy::save_energy;
use crate::schedule::{energy_value, Schedule};
use crate::taskmodel::{EnergyParams, Instance, MachineConfig, ModelError, TaskGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphKind {
    Chains,
    LayeredDag,
    RandomDag,
}

impl FromStr for GraphKind {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "chains" => Ok(GraphKind::Chains),
            "layered-dag" => Ok(GraphKind::LayeredDag),
            "random-dag" => Ok(GraphKind::RandomDag),
            other => Err(GenError::InvalidSpec(format!("unknown kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub kind: GraphKind,
    /// Task count (ignored for layered DAGs, where the widths decide it).
    pub n: usize,
    /// Number of chains.
    pub r: Option<usize>,
    pub widths: Vec<usize>,
    /// Edge probability for DAG kinds.
    pub p: f64,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn chains(n: usize, r: usize, seed: u64) -> Self {
        GeneratorSpec { kind: GraphKind::Chains, n, r: Some(r), widths: Vec::new(), p: 0.5, seed }
    }

    pub fn layered(widths: Vec<usize>, p: f64, seed: u64) -> Self {
        GeneratorSpec { kind: GraphKind::LayeredDag, n: widths.iter().sum(), r: None, widths, p, seed }
    }

    pub fn random_dag(n: usize, p: f64, seed: u64) -> Self {
        GeneratorSpec { kind: GraphKind::RandomDag, n, r: None, widths: Vec::new(), p, seed }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Chain lengths `l_1 >= ... >= l_r` summing to `n`, uniform over compositions.
pub fn random_chain_lengths(n: usize, r: usize, rng: &mut impl Rng) -> Vec<usize> {
    if n == 0 {
        return Vec::new();
    }
    let mut cuts: Vec<usize> = sample(rng, n - 1, r - 1).into_iter().map(|c| c + 1).collect();
    cuts.sort_unstable();
    let mut lengths = Vec::with_capacity(r);
    let mut prev = 0;
    for c in cuts.into_iter().chain(std::iter::once(n)) {
        lengths.push(c - prev);
        prev = c;
    }
    lengths.sort_unstable_by(|a, b| b.cmp(a));
    lengths
}

pub fn generate(spec: &GeneratorSpec, config: MachineConfig) -> Result<Instance, GenError> {
    if !(0.0..=1.0).contains(&spec.p) {
        return Err(GenError::InvalidSpec(format!("edge probability {} outside [0, 1]", spec.p)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    match spec.kind {
        GraphKind::Chains => {
            let r = spec.r.ok_or_else(|| GenError::InvalidSpec("chains need r".into()))?;
            if spec.n > 0 && (r == 0 || r > spec.n) {
                return Err(GenError::InvalidSpec(format!("need 1 <= r <= n, got r = {r}, n = {}", spec.n)));
            }
            let lengths = random_chain_lengths(spec.n, r, &mut rng);
            Ok(Instance::from_chain_lengths(&lengths, config))
        }
        GraphKind::LayeredDag => {
            if spec.widths.contains(&0) {
                return Err(GenError::InvalidSpec("layer widths must be positive".into()));
            }
            let mut edges = Vec::new();
            let mut offset = 0;
            for pair in spec.widths.windows(2) {
                let (upper, lower) = (offset..offset + pair[0], offset + pair[0]..offset + pair[0] + pair[1]);
                for v in lower {
                    let mut preds: Vec<usize> = upper.clone().filter(|_| rng.random_bool(spec.p)).collect();
                    if preds.is_empty() {
                        preds.push(rng.random_range(upper.clone()));
                    }
                    edges.extend(preds.into_iter().map(|u| (u, v)));
                }
                offset += pair[0];
            }
            let n = spec.widths.iter().sum();
            Ok(Instance::new(TaskGraph::new(n, edges)?, config))
        }
        GraphKind::RandomDag => {
            let mut edges = Vec::new();
            for v in 0..spec.n {
                for u in 0..v {
                    if rng.random_bool(spec.p) {
                        edges.push((u, v));
                    }
                }
            }
            Ok(Instance::new(TaskGraph::new(spec.n, edges)?, config))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algo {
    Remnants,
    LpRound,
    List,
    Oracle,
}

impl Algo {
    pub const ALL: [Algo; 4] = [Algo::Remnants, Algo::LpRound, Algo::List, Algo::Oracle];

    pub fn name(self) -> &'static str {
        match self {
            Algo::Remnants => "remnants",
            Algo::LpRound => "lp-round",
            Algo::List => "list",
            Algo::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algo {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algo::ALL.into_iter().find(|a| a.name() == s).ok_or_else(|| format!("unknown algorithm {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Remnants(#[from] RemnantsError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

impl SolveError {
    /// True when the instance was rejected for size alone.
    pub fn is_size_guard(&self) -> bool {
        matches!(
            self,
            SolveError::Lp(LpError::SizeLimitExceeded { .. })
                | SolveError::Oracle(OracleError::SizeLimitExceeded { .. } | OracleError::SearchBudgetExceeded { .. })
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolveOptions {
    pub seed: u64,
    /// Rounding trials; `None` means `20 n`.
    pub trials: Option<usize>,
    pub a2: bool,
    pub lp: LpOptions,
    pub oracle: OracleLimits,
}

impl SolveOptions {
    pub fn trials_for(&self, n: usize) -> usize {
        self.trials.unwrap_or_else(|| default_trials(n))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveOutput {
    pub schedule: Schedule,
    pub trace: Option<Vec<RoundTrace>>,
    pub pipeline: Option<PipelineReport>,
    /// LP optimum `D` for the LP-based algorithms.
    pub d_bar: Option<Rational>,
    /// `(n_s, C + D_s + D_1)` of the speed assignment used.
    pub list_bound: Option<(usize, Rational)>,
}

/// `list`: speed-based list scheduling of the assignment that puts a task on
/// the fast class exactly when its LP value is at least one half.
pub fn solve(instance: &Instance, algo: Algo, options: &SolveOptions) -> Result<SolveOutput, SolveError> {
    let plain = |schedule| SolveOutput { schedule, trace: None, pipeline: None, d_bar: None, list_bound: None };
    match algo {
        Algo::Remnants => {
            let (schedule, trace) = remnants_schedule(&instance.chains, &instance.config)?;
            Ok(SolveOutput { trace: Some(trace), ..plain(schedule) })
        }
        Algo::Oracle => Ok(plain(exact_optimal_schedule(instance, &options.oracle)?.1)),
        Algo::List => {
            let lp = solve_instance_lp(instance, &options.lp)?;
            let assignment = deterministic_rounding(&lp);
            let schedule = speed_based_list_schedule(instance, &assignment)?;
            let b = list_bound_quantities(&instance.graph, &assignment, &instance.config).map_err(|_| LpError::NoSlowMachines)?;
            Ok(SolveOutput { d_bar: Some(lp.d), list_bound: Some((b.n_s, b.total())), ..plain(schedule) })
        }
        Algo::LpRound => {
            let rounding = RoundingConfig::new(options.seed, options.trials_for(instance.n())).with_a2(options.a2);
            let report = rounding_pipeline(instance, &rounding, &options.lp)?;
            let best = &report.trials[report.best.trial];
            Ok(SolveOutput {
                schedule: report.best.schedule.clone(),
                trace: None,
                d_bar: Some(report.lp.d),
                list_bound: Some((best.n_s, best.list_bound())),
                pipeline: Some(report),
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyReport {
    pub alpha: Rational,
    pub before: String,
    pub after: String,
    pub makespan_after: Rational,
}

/// One solver run. Field order is the JSON order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub instance: String,
    pub algorithm: Algo,
    pub n: usize,
    pub m: usize,
    pub makespan: Rational,
    pub bounds: BoundReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy: Option<EnergyReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<u128>,
}

pub fn energy_report(instance: &Instance, schedule: &Schedule, params: &EnergyParams) -> EnergyReport {
    let improved = save_energy(schedule, &instance.graph, &instance.config, params);
    EnergyReport {
        alpha: params.alpha(),
        before: render_energy(&energy_value(schedule, &instance.config, params), false),
        after: render_energy(&energy_value(&improved, &instance.config, params), false),
        makespan_after: improved.makespan(),
    }
}

pub fn run_report(instance: &Instance, algo: Algo, options: &SolveOptions, output: &SolveOutput, params: Option<&EnergyParams>, wall_ms: Option<u128>) -> RunReport {
    let random = algo == Algo::LpRound;
    RunReport {
        instance: instance.digest(),
        algorithm: algo,
        n: instance.n(),
        m: instance.m(),
        makespan: output.schedule.makespan(),
        bounds: bound_report(instance),
        energy: params.map(|p| energy_report(instance, &output.schedule, p)),
        seed: random.then_some(options.seed),
        trials: random.then(|| options.trials_for(instance.n())),
        wall_ms,
    }
}

pub fn render_rational(value: Rational, float: bool) -> String {
    if float {
        value.to_decimal_string(6)
    } else {
        value.to_string()
    }
}

pub fn render_energy(value: &EnergyValue, float: bool) -> String {
    match value {
        EnergyValue::Exact(q) => render_rational(*q, float),
        EnergyValue::Approx(x) => format!("{:.6}", x.to_f64()),
    }
}

fn write_csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    if !header.is_empty() {
        writer.write_record(header).expect("in-memory write");
    }
    for row in rows {
        writer.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

pub const REPORT_HEADER: [&str; 12] =
    ["instance", "algo", "n", "m", "makespan", "A", "B_general", "max_lower", "alpha", "energy_before", "energy_after", "seed"];

/// Header line (without trailing newline) of the run-report CSV.
pub fn report_csv_header(timing: bool) -> String {
    let mut header = REPORT_HEADER.join(",");
    header.push_str(",trials");
    if timing {
        header.push_str(",wall_ms");
    }
    header
}

/// One run-report CSV line, without trailing newline. Energies use the
/// report's own rendering.
pub fn report_csv_row(report: &RunReport, float: bool, timing: bool) -> String {
    let r = |q: Rational| render_rational(q, float);
    let (alpha, before, after) = match &report.energy {
        Some(e) => (r(e.alpha), e.before.clone(), e.after.clone()),
        None => Default::default(),
    };
    let mut cells = vec![
        report.instance.clone(),
        report.algorithm.to_string(),
        report.n.to_string(),
        report.m.to_string(),
        r(report.makespan),
        r(report.bounds.a),
        r(report.bounds.b_general),
        r(report.bounds.max_lower),
        alpha,
        before,
        after,
        report.seed.map(|s| s.to_string()).unwrap_or_default(),
        report.trials.map(|t| t.to_string()).unwrap_or_default(),
    ];
    if timing {
        cells.push(report.wall_ms.map(|w| w.to_string()).unwrap_or_default());
    }
    let csv = write_csv(&[], [cells]);
    csv.trim_end().to_string()
}

pub const TRIALS_HEADER: [&str; 6] = ["trial", "makespan", "n_s", "C", "D_s", "D_1"];

pub fn trials_csv(records: &[TrialRecord], float: bool) -> String {
    let r = |q| render_rational(q, float);
    write_csv(
        &TRIALS_HEADER,
        records.iter().map(|t| vec![t.trial.to_string(), r(t.makespan), t.n_s.to_string(), r(t.c), r(t.d_s), r(t.d_1)]),
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchOptions {
    pub algos: Vec<Algo>,
    pub solve: SolveOptions,
    pub alpha: Rational,
    pub timing: bool,
    pub float: bool,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            algos: vec![Algo::Remnants, Algo::Oracle],
            solve: SolveOptions::default(),
            alpha: Rational::from(2),
            timing: false,
            float: false,
        }
    }
}

pub const BENCH_HEADER: [&str; 15] = [
    "instance",
    "algo",
    "n",
    "m",
    "makespan",
    "max_lower",
    "ratio_lower",
    "oracle",
    "ratio_oracle",
    "energy_before",
    "energy_after",
    "n_s",
    "d_bar",
    "c_plus_d",
    "error",
];

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BenchRow {
    pub instance: String,
    pub algo: String,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub makespan: Option<Rational>,
    pub max_lower: Option<Rational>,
    pub oracle: Option<Rational>,
    pub energy_before: Option<EnergyValue>,
    pub energy_after: Option<EnergyValue>,
    pub n_s: Option<usize>,
    pub d_bar: Option<Rational>,
    pub c_plus_d: Option<Rational>,
    pub error: Option<String>,
    pub wall_ms: Option<u128>,
}

impl BenchRow {
    fn cells(&self, float: bool, timing: bool) -> Vec<String> {
        let r = |q: Option<Rational>| q.map(|q| render_rational(q, float)).unwrap_or_default();
        let ratio = |a: Option<Rational>, b: Option<Rational>| match (a, b) {
            (Some(a), Some(b)) if b.is_positive() => r(Some(a / b)),
            _ => String::new(),
        };
        let e = |v: &Option<EnergyValue>| v.as_ref().map(|v| render_energy(v, float)).unwrap_or_default();
        let u = |v: Option<usize>| v.map(|v| v.to_string()).unwrap_or_default();
        let mut cells = vec![
            self.instance.clone(),
            self.algo.clone(),
            u(self.n),
            u(self.m),
            r(self.makespan),
            r(self.max_lower),
            ratio(self.makespan, self.max_lower),
            r(self.oracle),
            ratio(self.makespan, self.oracle),
            e(&self.energy_before),
            e(&self.energy_after),
            u(self.n_s),
            r(self.d_bar),
            r(self.c_plus_d),
            self.error.clone().unwrap_or_default(),
        ];
        if timing {
            cells.push(self.wall_ms.map(|w| w.to_string()).unwrap_or_default());
        }
        cells
    }
}

fn bench_instance(name: &str, instance: &Instance, options: &BenchOptions) -> Vec<BenchRow> {
    let params = EnergyParams::new(options.alpha).expect("alpha validated by caller");
    let max_lower = bound_report(instance).max_lower;
    let oracle = exact_optimal_schedule(instance, &options.solve.oracle).ok().map(|(t, _)| t);
    options
        .algos
        .iter()
        .map(|&algo| {
            let mut row = BenchRow {
                instance: name.to_string(),
                algo: algo.to_string(),
                n: Some(instance.n()),
                m: Some(instance.m()),
                max_lower: Some(max_lower),
                oracle,
                ..BenchRow::default()
            };
            let clock = Instant::now();
            match solve(instance, algo, &options.solve) {
                Ok(out) => {
                    let improved = save_energy(&out.schedule, &instance.graph, &instance.config, &params);
                    row.makespan = Some(out.schedule.makespan());
                    row.energy_before = Some(energy_value(&out.schedule, &instance.config, &params));
                    row.energy_after = Some(energy_value(&improved, &instance.config, &params));
                    row.d_bar = out.d_bar;
                    row.n_s = out.list_bound.map(|b| b.0);
                    row.c_plus_d = out.list_bound.map(|b| b.1);
                }
                Err(e) => row.error = Some(e.to_string()),
            }
            if options.timing {
                row.wall_ms = Some(clock.elapsed().as_millis());
            }
            row
        })
        .collect()
}

/// Rows for every `(instance, algo)` pair; instances in the given order.
pub fn bench_rows(corpus: &[(String, Result<Instance, String>)], options: &BenchOptions) -> Vec<BenchRow> {
    corpus
        .par_iter()
        .map(|(name, instance)| match instance {
            Ok(instance) => bench_instance(name, instance, options),
            Err(e) => vec![BenchRow { instance: name.clone(), error: Some(e.clone()), ..BenchRow::default() }],
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

pub fn bench_csv(rows: &[BenchRow], options: &BenchOptions) -> String {
    let mut header = BENCH_HEADER.to_vec();
    if options.timing {
        header.push("wall_ms");
    }
    write_csv(&header, rows.iter().map(|r| r.cells(options.float, options.timing)))
}

/// `*.json` files directly under `dir`, sorted by path.
pub fn corpus_paths(dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut paths = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "json") {
            paths.push(path);
        }
    }
    paths.sort();
    Ok(paths)
}

/// Benchmarks every instance file in `dir`; unreadable files become error rows.
pub fn bench_dir(dir: &Path, options: &BenchOptions) -> std::io::Result<String> {
    let corpus: Vec<_> = corpus_paths(dir)?
        .into_iter()
        .map(|path| {
            let name = path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
            let instance = std::fs::read_to_string(&path)
                .map_err(|e| e.to_string())
                .and_then(|text| Instance::from_json(&text).map_err(|e| e.to_string()));
            (name, instance)
        })
        .collect();
    Ok(bench_csv(&bench_rows(&corpus, options), options))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::taskmodel::MachineConfig;
    use proptest::prelude::*;

    fn two_speed(m: usize, s: i128) -> MachineConfig {
        MachineConfig::two_speed(m, 1, Rational::from(s)).unwrap()
    }

    #[test]
    fn chains_generator() {
        let spec = GeneratorSpec::chains(10, 4, 7);
        let a = generate(&spec, two_speed(3, 2)).unwrap();
        let b = generate(&spec, two_speed(3, 2)).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        let lengths = a.chains.lengths();
        assert_eq!(lengths.len(), 4);
        assert_eq!(lengths.iter().sum::<usize>(), 10);
        assert!(lengths.windows(2).all(|w| w[0] >= w[1]));
        assert!(generate(&GeneratorSpec::chains(3, 4, 0), two_speed(2, 2)).is_err());
    }

    #[test]
    fn layered_generator() {
        let inst = generate(&GeneratorSpec::layered(vec![2, 2], 0.5, 1), two_speed(2, 2)).unwrap();
        assert_eq!(inst.n(), 4);
        assert!(!inst.graph.edges().is_empty());
        assert!(inst.graph.edges().iter().all(|&(u, v)| u < 2 && v >= 2));
    }

    #[test]
    fn empty_random_dag() {
        let inst = generate(&GeneratorSpec::random_dag(0, 0.3, 5), two_speed(2, 2)).unwrap();
        assert_eq!(inst.n(), 0);
    }

    fn four_chains(s: i128) -> Instance {
        Instance::from_chain_lengths(&[3, 3, 2, 2], two_speed(3, s))
    }

    #[test]
    fn solve_dispatch() {
        let options = SolveOptions { trials: Some(50), seed: 3, ..SolveOptions::default() };
        let inst = four_chains(4);
        assert_eq!(solve(&inst, Algo::Remnants, &options).unwrap().schedule.makespan(), rat(2, 1));
        assert_eq!(solve(&inst, Algo::Oracle, &options).unwrap().schedule.makespan(), rat(2, 1));
        let out = solve(&inst, Algo::LpRound, &options).unwrap();
        out.schedule.validate_for(&inst).unwrap();
        assert!(out.schedule.makespan() <= rat(6, 1));
        let list = solve(&inst, Algo::List, &options).unwrap();
        list.schedule.validate_for(&inst).unwrap();
        assert!(list.schedule.makespan() <= list.list_bound.unwrap().1);
    }

    #[test]
    fn bench_instance_pair() {
        let corpus = vec![("s3.json".to_string(), Ok(four_chains(3))), ("s4.json".to_string(), Ok(four_chains(4)))];
        let options = BenchOptions::default();
        let rows = bench_rows(&corpus, &options);
        assert_eq!(rows.len(), 4);
        let ratios: Vec<Rational> = rows
            .iter()
            .filter(|r| r.algo == "remnants")
            .map(|r| r.makespan.unwrap() / r.oracle.unwrap())
            .collect();
        assert_eq!(ratios, vec![rat(7, 6), rat(1, 1)]);
        let csv = bench_csv(&rows, &options);
        assert_eq!(csv.lines().count(), 5);
        assert_eq!(csv, bench_csv(&bench_rows(&corpus, &options), &options));
        assert!(csv.lines().nth(1).unwrap().starts_with("s3.json,remnants,10,3,7/3,"));
    }

    #[test]
    fn empty_bench_is_header_only() {
        let options = BenchOptions { timing: true, ..BenchOptions::default() };
        let csv = bench_csv(&bench_rows(&[], &options), &options);
        assert_eq!(csv.trim_end(), format!("{},wall_ms", BENCH_HEADER.join(",")));
    }

    #[test]
    fn trials_table() {
        let records = vec![TrialRecord { trial: 0, makespan: rat(5, 2), n_s: 3, c: rat(3, 2), d_s: rat(1, 2), d_1: Rational::ONE }];
        assert_eq!(trials_csv(&records, false), "trial,makespan,n_s,C,D_s,D_1\n0,5/2,3,3/2,1/2,1\n");
        assert_eq!(trials_csv(&records, true).lines().nth(1).unwrap(), "0,2.500000,3,1.500000,0.500000,1.000000");
    }

    #[test]
    fn report_row() {
        let inst = four_chains(4);
        let options = SolveOptions::default();
        let out = solve(&inst, Algo::Remnants, &options).unwrap();
        let params = EnergyParams::new(rat(2, 1)).unwrap();
        let report = run_report(&inst, Algo::Remnants, &options, &out, Some(&params), None);
        let row = report_csv_row(&report, false, false);
        let header = report_csv_header(false);
        assert_eq!(row.split(',').count(), header.split(',').count());
        assert!(row.starts_with(&format!("{},remnants,10,3,2,5/3,", inst.digest())));
    }

    proptest! {
        #[test]
        fn generated_instances_are_valid(n in 0usize..30, r in 1usize..6, p in 0.0f64..1.0, seed in any::<u64>()) {
            let cfg = two_speed(3, 2);
            let dag = generate(&GeneratorSpec::random_dag(n, p, seed), cfg.clone()).unwrap();
            prop_assert_eq!(dag.n(), n);
            prop_assert!(dag.graph.edges().iter().all(|&(u, v)| u < v));
            if r <= n {
                let chains = generate(&GeneratorSpec::chains(n, r, seed), cfg).unwrap();
                prop_assert_eq!(chains.chains.r(), r);
                prop_assert_eq!(chains.n(), n);
            }
        }
    }
}
