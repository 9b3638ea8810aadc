use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use asymsched_core::bounds::bound_report;
use asymsched_core::harness::{
    bench_dir, generate, render_energy, render_rational, report_csv_header, report_csv_row, run_report, solve, trials_csv, Algo,
    BenchOptions, GeneratorSpec, GraphKind, SolveError, SolveOptions,
};
use asymsched_core::oracle::{asymmetrize, OracleError, SymmetricConfig};
use asymsched_core::save_energy::{save_energy, verify_local_optimality};
use asymsched_core::schedule::energy_value;
use asymsched_core::{EnergyParams, Instance, MachineConfig, Rational, Schedule};

/// Scheduling unit-task DAGs on asymmetric multiprocessors.
#[derive(Parser)]
#[command(name = "asymsched", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance.
    Gen(GenArgs),
    /// Schedule an instance with one algorithm.
    Solve(SolveArgs),
    /// Check a schedule against an instance.
    Validate(ValidateArgs),
    /// Print the makespan lower bounds of an instance.
    Bounds(BoundsArgs),
    /// Post-process a schedule with Save-Energy.
    OptimizeEnergy(EnergyArgs),
    /// Move a symmetric-platform schedule onto an asymmetric platform.
    TransformSym(TransformArgs),
    /// Run algorithms over a directory of instances and write a CSV.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_parser = parse_kind)]
    kind: GraphKind,
    /// Task count (chains, random-dag).
    #[arg(long, default_value_t = 0)]
    n: usize,
    /// Number of chains.
    #[arg(long)]
    r: Option<usize>,
    /// Layer widths for layered-dag, e.g. 2,3,2.
    #[arg(long, value_delimiter = ',')]
    widths: Vec<usize>,
    /// Edge probability.
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Machine speeds, fastest first, e.g. 4,1,1.
    #[arg(long, value_delimiter = ',', required = true)]
    speeds: Vec<Rational>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EnergyFlags {
    /// Energy exponent; power is speed^(alpha - 1) per unit time.
    #[arg(long)]
    alpha: Option<Rational>,
    /// Allow non-integer alpha (energies become fixed-point approximations).
    #[arg(long)]
    approx_energy: bool,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_parser = parse_algo)]
    algo: Algo,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Rounding trials for lp-round (default 20 n).
    #[arg(long)]
    trials: Option<usize>,
    /// Use the two-threshold rounding variant.
    #[arg(long)]
    a2: bool,
    /// Write the Remnants round trace as JSON.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write the per-trial CSV of lp-round.
    #[arg(long)]
    trials_csv: Option<PathBuf>,
    /// Append one row to this run-report CSV.
    #[arg(long)]
    report: Option<PathBuf>,
    #[command(flatten)]
    energy: EnergyFlags,
    #[arg(long)]
    float: bool,
    /// Record wall time in the report.
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    schedule: PathBuf,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    float: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EnergyArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    schedule: PathBuf,
    #[arg(long, default_value = "2")]
    alpha: Rational,
    #[arg(long)]
    approx_energy: bool,
    /// Write before/after energy and makespan as JSON.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    float: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TransformArgs {
    /// Instance on a symmetric platform.
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    schedule: PathBuf,
    /// JSON list of target speeds (or an object with a `speeds` field).
    #[arg(long)]
    target: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, value_delimiter = ',', value_parser = parse_algo, default_value = "remnants,oracle")]
    algos: Vec<Algo>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    a2: bool,
    #[arg(long, default_value = "2")]
    alpha: Rational,
    #[arg(long)]
    approx_energy: bool,
    #[arg(long)]
    float: bool,
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_kind(s: &str) -> Result<GraphKind, String> {
    s.parse().map_err(|e: asymsched_core::harness::GenError| e.to_string())
}

fn parse_algo(s: &str) -> Result<Algo, String> {
    s.parse()
}

/// A failed command: message plus exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl ToString) -> Self {
        Failure { code: 2, message: message.to_string() }
    }

    fn invalid(message: impl ToString) -> Self {
        Failure { code: 1, message: message.to_string() }
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        Failure { code: if e.is_size_guard() { 3 } else { 2 }, message: e.to_string() }
    }
}

type CmdResult = Result<(), Failure>;

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn read_instance(path: &Path) -> Result<Instance, Failure> {
    Instance::from_json(&read_text(path)?).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn read_schedule(path: &Path) -> Result<Schedule, Failure> {
    Schedule::from_json(&read_text(path)?).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> CmdResult {
    fs::write(path, text).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

/// Writes to `out` or, without one, to stdout.
fn emit(out: Option<&Path>, text: &str) -> CmdResult {
    match out {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn with_newline(mut text: String) -> String {
    text.push('\n');
    text
}

fn energy_params(alpha: Rational, approx: bool) -> Result<EnergyParams, Failure> {
    if !approx && !(alpha.is_integer() && alpha >= Rational::from(2)) {
        return Err(Failure::usage(format!("alpha must be an integer >= 2, got {alpha} (use --approx-energy for other values)")));
    }
    EnergyParams::new(alpha).map_err(Failure::usage)
}

fn cmd_gen(args: GenArgs) -> CmdResult {
    let config = MachineConfig::new(args.speeds).map_err(Failure::usage)?;
    let spec = GeneratorSpec { kind: args.kind, n: args.n, r: args.r, widths: args.widths, p: args.p, seed: args.seed };
    let instance = generate(&spec, config).map_err(Failure::usage)?;
    emit(args.out.as_deref(), &with_newline(instance.to_json_pretty()))
}

fn cmd_solve(args: SolveArgs) -> CmdResult {
    let instance = read_instance(&args.instance)?;
    let params = args.energy.alpha.map(|a| energy_params(a, args.energy.approx_energy)).transpose()?;
    if args.trace.is_some() && args.algo != Algo::Remnants {
        return Err(Failure::usage("--trace needs --algo remnants"));
    }
    if args.trials_csv.is_some() && args.algo != Algo::LpRound {
        return Err(Failure::usage("--trials-csv needs --algo lp-round"));
    }
    let options = SolveOptions { seed: args.seed, trials: args.trials, a2: args.a2, ..SolveOptions::default() };
    let clock = Instant::now();
    let output = solve(&instance, args.algo, &options)?;
    let wall_ms = args.timing.then(|| clock.elapsed().as_millis());
    output
        .schedule
        .validate_for(&instance)
        .map_err(|e| Failure::invalid(format!("produced schedule is invalid: {e}")))?;

    if let (Some(path), Some(trace)) = (&args.trace, &output.trace) {
        let json = serde_json::to_string_pretty(trace).expect("trace serializes");
        write_file(path, &with_newline(json))?;
    }
    if let (Some(path), Some(pipeline)) = (&args.trials_csv, &output.pipeline) {
        write_file(path, &trials_csv(&pipeline.trials, args.float))?;
    }
    let report = run_report(&instance, args.algo, &options, &output, params.as_ref(), wall_ms);
    if let Some(path) = &args.report {
        append_report(path, &report_csv_row(&report, args.float, args.timing), args.timing)?;
    }
    eprintln!("{}", serde_json::to_string(&report).expect("report serializes"));
    emit(args.out.as_deref(), &with_newline(output.schedule.to_json()))
}

fn append_report(path: &Path, row: &str, timing: bool) -> CmdResult {
    let fresh = fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let mut file = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| Failure::usage(format!("cannot open {}: {e}", path.display())))?;
    let mut text = String::new();
    if fresh {
        text.push_str(&report_csv_header(timing));
        text.push('\n');
    }
    text.push_str(row);
    text.push('\n');
    file.write_all(text.as_bytes()).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

fn cmd_validate(args: ValidateArgs) -> CmdResult {
    let instance = read_instance(&args.instance)?;
    let schedule = read_schedule(&args.schedule)?;
    schedule.validate_for(&instance).map_err(|e| Failure::invalid(format!("invalid schedule: {e}")))?;
    println!("ok: makespan {}", schedule.makespan());
    Ok(())
}

fn cmd_bounds(args: BoundsArgs) -> CmdResult {
    let instance = read_instance(&args.instance)?;
    let report = bound_report(&instance);
    if args.json {
        let json = serde_json::to_string_pretty(&report).expect("bounds serialize");
        return emit(args.out.as_deref(), &with_newline(json));
    }
    let r = |q: Option<Rational>| q.map(|q| render_rational(q, args.float)).unwrap_or_else(|| "n/a".into());
    let rows = [
        ("A", r(Some(report.a))),
        ("B_general", r(Some(report.b_general))),
        ("B_two_speed", r(report.b_two_speed)),
        ("single_fast", r(report.single_fast)),
        ("max_lower", r(Some(report.max_lower))),
    ];
    let width = rows.iter().map(|(name, _)| name.len()).max().unwrap_or(0);
    let table: String = rows.iter().map(|(name, value)| format!("{name:<width$}  {value}\n")).collect();
    emit(args.out.as_deref(), &table)
}

#[derive(Serialize)]
struct EnergyOutcome {
    alpha: String,
    energy_before: String,
    energy_after: String,
    makespan_before: String,
    makespan_after: String,
    locally_optimal: bool,
}

fn cmd_optimize_energy(args: EnergyArgs) -> CmdResult {
    let instance = read_instance(&args.instance)?;
    let schedule = read_schedule(&args.schedule)?;
    let params = energy_params(args.alpha, args.approx_energy)?;
    schedule.validate_for(&instance).map_err(|e| Failure::invalid(format!("invalid schedule: {e}")))?;
    let improved = save_energy(&schedule, &instance.graph, &instance.config, &params);
    let r = |q| render_rational(q, args.float);
    let outcome = EnergyOutcome {
        alpha: r(params.alpha()),
        energy_before: render_energy(&energy_value(&schedule, &instance.config, &params), args.float),
        energy_after: render_energy(&energy_value(&improved, &instance.config, &params), args.float),
        makespan_before: r(schedule.makespan()),
        makespan_after: r(improved.makespan()),
        locally_optimal: verify_local_optimality(&improved, &instance.graph, &instance.config, &params).is_ok(),
    };
    let json = serde_json::to_string_pretty(&outcome).expect("outcome serializes");
    match &args.report {
        Some(path) => write_file(path, &with_newline(json))?,
        None => eprintln!("{json}"),
    }
    emit(args.out.as_deref(), &with_newline(improved.to_json()))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum TargetFile {
    List(Vec<Rational>),
    Object { speeds: Vec<Rational> },
}

fn cmd_transform_sym(args: TransformArgs) -> CmdResult {
    let instance = read_instance(&args.instance)?;
    let schedule = read_schedule(&args.schedule)?;
    let target: TargetFile = serde_json::from_str(&read_text(&args.target)?)
        .map_err(|e| Failure::usage(format!("{}: {e}", args.target.display())))?;
    let speeds = match target {
        TargetFile::List(s) | TargetFile::Object { speeds: s } => s,
    };
    let target = MachineConfig::new(speeds).map_err(Failure::usage)?;
    if !instance.config.is_symmetric() {
        return Err(Failure::usage("instance platform is not symmetric"));
    }
    schedule.validate_for(&instance).map_err(|e| Failure::invalid(format!("invalid schedule: {e}")))?;
    let sym = SymmetricConfig::new(instance.m(), instance.config.speed(0)).map_err(Failure::usage)?;
    let moved = asymmetrize(&schedule, &sym, &target).map_err(|e| match e {
        OracleError::InvalidSchedule(e) => Failure::invalid(format!("invalid schedule: {e}")),
        other => Failure::usage(other),
    })?;
    moved
        .validate(&instance.graph, &target)
        .map_err(|e| Failure::invalid(format!("transformed schedule is invalid: {e}")))?;
    emit(args.out.as_deref(), &with_newline(moved.to_json()))
}

fn cmd_bench(args: BenchArgs) -> CmdResult {
    energy_params(args.alpha, args.approx_energy)?;
    let options = BenchOptions {
        algos: args.algos,
        solve: SolveOptions { seed: args.seed, trials: args.trials, a2: args.a2, ..SolveOptions::default() },
        alpha: args.alpha,
        timing: args.timing,
        float: args.float,
    };
    let csv = bench_dir(&args.corpus, &options).map_err(|e| Failure::usage(format!("{}: {e}", args.corpus.display())))?;
    emit(args.out.as_deref(), &csv)
}

fn main() -> ExitCode {
    let result = match Cli::parse().command {
        Command::Gen(args) => cmd_gen(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Validate(args) => cmd_validate(args),
        Command::Bounds(args) => cmd_bounds(args),
        Command::OptimizeEnergy(args) => cmd_optimize_energy(args),
        Command::TransformSym(args) => cmd_transform_sym(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
