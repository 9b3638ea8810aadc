//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails. Thresholds are pinned below.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use asymsched_core::bounds::{list_bound_quantities, max_lower_bound};
use asymsched_core::harness::{bench_csv, bench_rows, generate, random_chain_lengths, solve, trials_csv, Algo, BenchOptions, GeneratorSpec, SolveOptions};
use asymsched_core::lprelax::{
    deterministic_rounding, rounding_pipeline, solve_instance_lp, speed_based_list_schedule, LpOptions, PipelineReport, RoundingConfig,
};
use asymsched_core::oracle::{
    asymmetrize, exact_optimal_schedule, exhaustive_min_energy, has_idle_interval, EnergyLimits, OracleLimits, SymmetricConfig,
};
use asymsched_core::power::EnergyValue;
use asymsched_core::remnants::remnants_schedule;
use asymsched_core::save_energy::{closest_to_target, hole_saving, optimal_target_speed, save_energy, verify_local_optimality};
use asymsched_core::schedule::Schedule;
use asymsched_core::{rat, EnergyParams, Instance, MachineConfig, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const CORPUS_SEED: u64 = 0x5eed_2024;
const CHAIN_CORPUS: usize = 500;
const LP_CORPUS: usize = 200;
const ENERGY_INSTANCES: usize = 100;
const DOMINANCE_CORPUS: usize = 200;
const MAX_N: usize = 12;
const ROUNDING_TRIALS: usize = 1000;
/// Mean makespan over the trials may not exceed this multiple of the optimum.
const EXPECTATION_FACTOR: i128 = 3;
const LIMIT_EXAMPLES: Duration = Duration::from_secs(1);
const LIMIT_CHAINS: Duration = Duration::from_secs(300);
const LIMIT_ROUNDING: Duration = Duration::from_secs(600);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn two_speed(m: usize, m_s: usize, s: i128) -> MachineConfig {
    MachineConfig::two_speed(m, m_s, Rational::from(s)).unwrap()
}

fn optimum(instance: &Instance) -> (Rational, Schedule) {
    exact_optimal_schedule(instance, &OracleLimits::default()).expect("corpus fits the oracle")
}

fn worked_examples() -> Outcome {
    let clock = Instant::now();
    let mut got = Vec::new();
    for s in [4, 3] {
        let inst = Instance::from_chain_lengths(&[3, 3, 2, 2], two_speed(3, 1, s));
        let (schedule, _) = remnants_schedule(&inst.chains, &inst.config).unwrap();
        got.push((schedule.makespan(), optimum(&inst).0));
    }
    let elapsed = clock.elapsed();
    let pass = got == [(rat(2, 1), rat(2, 1)), (rat(7, 3), rat(2, 1))] && elapsed < LIMIT_EXAMPLES;
    outcome(
        pass,
        format!(
            "s=4: remnants {} oracle {}; s=3: remnants {} oracle {}; {:.3}s",
            got[0].0,
            got[0].1,
            got[1].0,
            got[1].1,
            elapsed.as_secs_f64()
        ),
    )
}

/// Random chain instances with one fast processor.
fn chain_corpus() -> Vec<(Instance, i128)> {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    (0..CHAIN_CORPUS)
        .map(|_| {
            let n = rng.random_range(1..=MAX_N);
            let r = rng.random_range(1..=n);
            let m = rng.random_range(2..=4);
            let s = rng.random_range(2..=4);
            let lengths = random_chain_lengths(n, r, &mut rng);
            (Instance::from_chain_lengths(&lengths, two_speed(m, 1, s)), s)
        })
        .collect()
}

struct ChainRow {
    optimum: Rational,
    remnants: Rational,
    lower: Rational,
    s: i128,
}

fn remnants_guarantee(rows: &[ChainRow], elapsed: Duration) -> Outcome {
    let violations = rows.iter().filter(|r| r.remnants > r.optimum + Rational::from(r.s).recip()).count();
    let exact = rows.iter().filter(|r| r.remnants == r.optimum).count();
    outcome(
        violations == 0 && rows.len() >= CHAIN_CORPUS && elapsed < LIMIT_CHAINS,
        format!("{} instances, {violations} violations, {exact} optimal, {:.1}s", rows.len(), elapsed.as_secs_f64()),
    )
}

fn lower_bounds(rows: &[ChainRow], preemptive: &[(Rational, Rational)]) -> Outcome {
    let oracle_violations = rows.iter().filter(|r| r.lower > r.optimum).count();
    let tight = rows.iter().filter(|r| r.lower == r.optimum).count();
    let preemptive_violations = preemptive.iter().filter(|(lower, makespan)| lower > makespan).count();
    outcome(
        oracle_violations == 0 && preemptive_violations == 0 && !preemptive.is_empty(),
        format!(
            "{} oracle comparisons ({tight} tight), {} preemptive schedules, {} violations",
            rows.len(),
            preemptive.len(),
            oracle_violations + preemptive_violations
        ),
    )
}

/// Two-speed instances for the LP: half chains, half DAGs with cross edges.
fn lp_corpus() -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED ^ 0x1b);
    (0..LP_CORPUS)
        .map(|i| {
            let n = rng.random_range(1..=10);
            let m = rng.random_range(2..=4);
            let m_s = rng.random_range(1..m);
            let s = rng.random_range(2..=4);
            let config = two_speed(m, m_s, s);
            let seed = rng.random();
            let spec = if i % 2 == 0 {
                GeneratorSpec::chains(n, rng.random_range(1..=n), seed)
            } else {
                GeneratorSpec::random_dag(n, 0.3, seed)
            };
            generate(&spec, config).unwrap()
        })
        .collect()
}

struct LpRow {
    optimum: Rational,
    report: PipelineReport,
    list_violations: usize,
}

fn lp_soundness(rows: &[LpRow]) -> Outcome {
    let violations = rows.iter().filter(|r| r.report.lp.d > r.optimum).count();
    let chain = |lengths: &[usize], m: usize| {
        let inst = Instance::from_chain_lengths(lengths, two_speed(m, 1, 2));
        solve_instance_lp(&inst, &LpOptions::default()).unwrap().d
    };
    let worked = (chain(&[5], 2), chain(&[4, 4], 2));
    let pass = violations == 0 && rows.len() >= LP_CORPUS && worked == (rat(5, 2), rat(8, 3));
    outcome(pass, format!("{} instances, {violations} with D > T_opt; worked D = {} and {}", rows.len(), worked.0, worked.1))
}

fn list_bound(rows: &[LpRow], extra: usize, extra_violations: usize) -> Outcome {
    let checked: usize = rows.iter().map(|r| r.report.trials.len()).sum::<usize>() + extra;
    let violations: usize = rows.iter().map(|r| r.list_violations).sum::<usize>() + extra_violations;
    outcome(violations == 0, format!("{checked} rounded assignments, {violations} with T > C + D_s + D_1"))
}

fn expectation(rows: &[LpRow], elapsed: Duration) -> Outcome {
    let mut flagged = 0;
    let mut worst_mean = 0.0f64;
    let mut worst_trial = 0.0f64;
    for row in rows {
        let total: Rational = row.report.trials.iter().map(|t| t.makespan).sum();
        let mean = total / Rational::from(row.report.trials.len());
        if mean > Rational::from(EXPECTATION_FACTOR) * row.optimum {
            flagged += 1;
        }
        if row.optimum.is_positive() {
            worst_mean = worst_mean.max((mean / row.optimum).to_f64());
            let max = row.report.trials.iter().map(|t| t.makespan).max().unwrap();
            worst_trial = worst_trial.max((max / row.optimum).to_f64());
        }
    }
    outcome(
        flagged == 0 && elapsed < LIMIT_ROUNDING,
        format!(
            "{} instances x {ROUNDING_TRIALS} trials, {flagged} with mean > {EXPECTATION_FACTOR} T_opt; worst mean/T_opt {worst_mean:.3}, worst trial/T_opt {worst_trial:.3}, {:.1}s",
            rows.len(),
            elapsed.as_secs_f64()
        ),
    )
}

struct EnergyRow {
    makespan_ok: bool,
    energy_ok: bool,
    fixed_point: bool,
    /// `energy(save_energy(S)) / optimum` for tiny instances.
    gap: Option<Rational>,
    below_optimum: bool,
    lower: Rational,
    makespan: Rational,
}

fn energy_rows() -> Vec<EnergyRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED ^ 0xe7);
    let instances: Vec<Instance> = (0..ENERGY_INSTANCES)
        .map(|i| {
            let tiny = i % 2 == 0;
            let n = if tiny { rng.random_range(1..=4) } else { rng.random_range(5..=9) };
            let m = if tiny { rng.random_range(2..=3) } else { rng.random_range(2..=4) };
            let s = rng.random_range(2..=3);
            let lengths = random_chain_lengths(n, rng.random_range(1..=n), &mut rng);
            Instance::from_chain_lengths(&lengths, two_speed(m, 1, s))
        })
        .collect();
    instances
        .par_iter()
        .flat_map_iter(|inst| {
            let (remnants, _) = remnants_schedule(&inst.chains, &inst.config).unwrap();
            let lp = solve_instance_lp(inst, &LpOptions::default()).unwrap();
            let list = speed_based_list_schedule(inst, &deterministic_rounding(&lp)).unwrap();
            let mut rows = Vec::new();
            for schedule in [remnants, list] {
                for alpha in [2, 3] {
                    let params = EnergyParams::new(Rational::from(alpha)).unwrap();
                    let out = save_energy(&schedule, &inst.graph, &inst.config, &params);
                    let before = schedule.energy(&inst.config, &params).unwrap();
                    let after = out.energy(&inst.config, &params).unwrap();
                    let tiny = inst.n() <= 4 && inst.m() <= 3;
                    let best = tiny.then(|| exhaustive_min_energy(inst, &params, schedule.makespan(), &EnergyLimits::default()).unwrap());
                    rows.push(EnergyRow {
                        makespan_ok: out.makespan() <= schedule.makespan() && out.validate_for(inst).is_ok(),
                        energy_ok: after <= before,
                        fixed_point: verify_local_optimality(&out, &inst.graph, &inst.config, &params).is_ok(),
                        gap: best.map(|b| after / b),
                        below_optimum: best.is_some_and(|b| after < b),
                        lower: max_lower_bound(inst),
                        makespan: out.makespan(),
                    });
                }
            }
            rows
        })
        .collect()
}

fn save_energy_contract(rows: &[EnergyRow]) -> Outcome {
    let broken = rows.iter().filter(|r| !r.makespan_ok || !r.energy_ok).count();
    let not_fixed = rows.iter().filter(|r| !r.fixed_point).count();
    let below = rows.iter().filter(|r| r.below_optimum).count();
    let gaps: Vec<f64> = rows.iter().filter_map(|r| r.gap.map(|g| g.to_f64())).collect();
    let equal = rows.iter().filter(|r| r.gap == Some(Rational::ONE)).count();
    let mean = gaps.iter().sum::<f64>() / gaps.len().max(1) as f64;
    let max = gaps.iter().copied().fold(1.0, f64::max);
    outcome(
        rows.len() >= 300 && broken == 0 && not_fixed == 0 && below == 0 && !gaps.is_empty(),
        format!(
            "{} schedules: {broken} worse, {not_fixed} not locally optimal; {} tiny vs optimum: {below} below, {equal} equal, mean gap {mean:.4}, max gap {max:.4}",
            rows.len(),
            gaps.len()
        ),
    )
}

fn target_speed_grid() -> Outcome {
    let mut checked = 0;
    let mut misses = Vec::new();
    let two = EnergyParams::new(rat(2, 1)).unwrap();
    let mut halves_exact = true;
    for alpha in [2, 3] {
        let params = EnergyParams::new(Rational::from(alpha)).unwrap();
        for k in 4..=32 {
            let c_u = rat(k, 4);
            if alpha == 2 {
                halves_exact &= optimal_target_speed(c_u, &two) == EnergyValue::Exact(c_u / Rational::from(2));
            }
            for step in [4, 8] {
                let candidates: Vec<Rational> = (1..).map(|j| rat(j, step)).take_while(|&v| v < c_u).collect();
                let saving = |v: Rational| hole_saving(c_u, v, Rational::ONE, &params).exact().unwrap();
                let best = candidates.iter().map(|&v| saving(v)).max().unwrap();
                let chosen = closest_to_target(c_u, &candidates, &params).unwrap();
                checked += 1;
                if saving(chosen) != best {
                    misses.push(format!("alpha={alpha} c_u={c_u} step=1/{step} chose {chosen}"));
                }
            }
        }
    }
    outcome(
        misses.is_empty() && halves_exact,
        format!("{checked} grids, {} misses{}; alpha=2 target = c_u/2 exactly: {halves_exact}", misses.len(), misses.first().map(|m| format!(" (first: {m})")).unwrap_or_default()),
    )
}

struct DominanceRow {
    symmetric: Rational,
    asymmetric: Rational,
    idle: bool,
    valid: bool,
    lower: Rational,
}

fn dominance_rows() -> Vec<DominanceRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED ^ 0xd0);
    let cases: Vec<(Instance, SymmetricConfig)> = (0..DOMINANCE_CORPUS)
        .map(|i| {
            let m = rng.random_range(2..=4);
            let mut speeds: Vec<i128> = (0..m).map(|_| rng.random_range(1..=4)).collect();
            speeds.sort_unstable_by(|a, b| b.cmp(a));
            if speeds.iter().all(|&c| c == speeds[0]) {
                speeds[0] += 1;
            }
            let target = MachineConfig::new(speeds.into_iter().map(Rational::from).collect()).unwrap();
            let n = rng.random_range(1..=8);
            let seed = rng.random();
            let spec = if i % 2 == 0 {
                GeneratorSpec::chains(n, rng.random_range(1..=n), seed)
            } else {
                GeneratorSpec::random_dag(n, 0.3, seed)
            };
            let sym = SymmetricConfig::matching(&target);
            (generate(&spec, target).unwrap(), sym)
        })
        .collect();
    cases
        .par_iter()
        .map(|(inst, sym)| {
            let (symmetric, schedule) = optimum(&inst.with_config(sym.config()));
            let moved = asymmetrize(&schedule, sym, &inst.config).unwrap();
            DominanceRow {
                symmetric,
                asymmetric: moved.makespan(),
                idle: has_idle_interval(&schedule, sym.m),
                valid: moved.validate_for(inst).is_ok(),
                lower: max_lower_bound(inst),
            }
        })
        .collect()
}

fn dominance(rows: &[DominanceRow]) -> Outcome {
    let violations = rows.iter().filter(|r| r.asymmetric > r.symmetric || !r.valid).count();
    let idle = rows.iter().filter(|r| r.idle).count();
    let strict = rows.iter().filter(|r| r.asymmetric < r.symmetric).count();
    let idle_not_strict = rows.iter().filter(|r| r.idle && r.asymmetric >= r.symmetric).count();
    outcome(
        rows.len() >= DOMINANCE_CORPUS && violations == 0 && idle_not_strict == 0,
        format!("{} instances, {violations} violations; {idle} with idle intervals, {strict} strict, {idle_not_strict} idle but not strict", rows.len()),
    )
}

fn determinism() -> Outcome {
    let run = || {
        let inst = generate(&GeneratorSpec::random_dag(9, 0.25, 11), two_speed(3, 1, 3)).unwrap();
        let options = SolveOptions { seed: 42, trials: Some(300), ..SolveOptions::default() };
        let out = solve(&inst, Algo::LpRound, &options).unwrap();
        let trials = trials_csv(&out.pipeline.unwrap().trials, false);
        let corpus: Vec<_> = (0..4)
            .map(|i| (format!("c{i}.json"), Ok(generate(&GeneratorSpec::chains(8, 3, i), two_speed(3, 1, 2)).unwrap())))
            .collect();
        let bench = BenchOptions { algos: Algo::ALL.to_vec(), solve: options, ..BenchOptions::default() };
        (inst.to_json(), out.schedule.to_json(), trials, bench_csv(&bench_rows(&corpus, &bench), &bench))
    };
    let first = run();
    let second = run();
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(run);
    outcome(first == second && first == single, format!("instance, schedule, trials CSV and bench CSV identical across 3 runs (one single-threaded): {}", first == second && first == single))
}

fn main() -> ExitCode {
    let started = Instant::now();
    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();

    results.push((1, "worked example reproduction", worked_examples()));

    let clock = Instant::now();
    let chain_rows: Vec<ChainRow> = chain_corpus()
        .par_iter()
        .map(|(inst, s)| {
            let (schedule, _) = remnants_schedule(&inst.chains, &inst.config).unwrap();
            ChainRow {
                optimum: optimum(inst).0,
                remnants: schedule.makespan(),
                lower: max_lower_bound(inst),
                s: *s,
            }
        })
        .collect();
    results.push((2, "Remnants within 1/s of optimum", remnants_guarantee(&chain_rows, clock.elapsed())));

    let clock = Instant::now();
    let lp_instances = lp_corpus();
    let lp_rows: Vec<LpRow> = lp_instances
        .par_iter()
        .enumerate()
        .map(|(i, inst)| {
            let report = rounding_pipeline(inst, &RoundingConfig::new(i as u64, ROUNDING_TRIALS), &LpOptions::default()).unwrap();
            let list_violations = report.trials.iter().filter(|t| t.makespan > t.list_bound()).count();
            LpRow { optimum: optimum(inst).0, report, list_violations }
        })
        .collect();
    let rounding_elapsed = clock.elapsed();

    // The deterministic threshold assignment goes through the same bound.
    let threshold: Vec<bool> = lp_rows
        .iter()
        .zip(&lp_instances)
        .map(|(row, inst)| {
            let assignment = deterministic_rounding(&row.report.lp);
            let schedule = speed_based_list_schedule(inst, &assignment).unwrap();
            schedule.makespan() <= list_bound_quantities(&inst.graph, &assignment, &inst.config).unwrap().total()
        })
        .collect();

    let energy = energy_rows();
    let dominance_data = dominance_rows();

    let preemptive: Vec<(Rational, Rational)> = energy
        .iter()
        .map(|r| (r.lower, r.makespan))
        .chain(dominance_data.iter().map(|r| (r.lower, r.asymmetric)))
        .collect();
    results.push((3, "lower bounds below optimum and preemptive schedules", lower_bounds(&chain_rows, &preemptive)));
    results.push((4, "LP relaxation soundness", lp_soundness(&lp_rows)));
    results.push((
        5,
        "list-scheduling bound T <= C + D_s + D_1",
        list_bound(&lp_rows, threshold.len(), threshold.iter().filter(|ok| !**ok).count()),
    ));
    results.push((6, "3-approximation in expectation", expectation(&lp_rows, rounding_elapsed)));
    results.push((7, "Save-Energy contract", save_energy_contract(&energy)));
    results.push((8, "target-speed rule on grids", target_speed_grid()));
    results.push((9, "asymmetric dominance", dominance(&dominance_data)));
    results.push((10, "determinism", determinism()));

    let mut failed = 0;
    for (id, name, result) in &results {
        let tag = if result.pass { "PASS" } else { "FAIL" };
        println!("{tag} AC{id:<2} {name}: {}", result.detail);
        failed += usize::from(!result.pass);
    }
    println!("acceptance: {} passed, {failed} failed in {:.1}s", results.len() - failed, started.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
