//! Python bindings. Rationals cross the boundary as `fractions.Fraction`;
//! inputs may be ints, Fractions or strings such as `"3/2"`.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use asymsched_core::bounds::bound_report;
use asymsched_core::harness::{generate as generate_instance, solve as solve_instance, Algo, GeneratorSpec, SolveError, SolveOptions};
use asymsched_core::oracle::{asymmetrize as asymmetrize_schedule, exact_optimal_schedule, OracleError, OracleLimits, SymmetricConfig};
use asymsched_core::power::EnergyValue;
use asymsched_core::save_energy::{save_energy as save_energy_schedule, verify_local_optimality};
use asymsched_core::schedule::energy_value;
use asymsched_core::{EnergyParams, Instance, MachineConfig, Rational, Schedule, Segment, TaskGraph};

create_exception!(asymsched, SizeGuardError, PyException, "Instance too large for an exact solver.");
create_exception!(asymsched, InvalidScheduleError, PyValueError, "Schedule violates the instance.");

fn value_error(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn solve_error(e: SolveError) -> PyErr {
    if e.is_size_guard() {
        SizeGuardError::new_err(e.to_string())
    } else {
        value_error(e)
    }
}

fn fraction(py: Python<'_>, q: Rational) -> PyResult<Bound<'_, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((q.numer(), q.denom()))
}

fn energy_object<'py>(py: Python<'py>, value: &EnergyValue) -> PyResult<Bound<'py, PyAny>> {
    match value {
        EnergyValue::Exact(q) => fraction(py, *q),
        EnergyValue::Approx(x) => Ok(x.to_f64().into_pyobject(py)?.into_any()),
    }
}

/// Accepts anything whose `str()` parses as a rational.
fn rational(obj: &Bound<'_, PyAny>) -> PyResult<Rational> {
    obj.str()?.to_str()?.parse().map_err(value_error)
}

fn rationals(objs: &[Bound<'_, PyAny>]) -> PyResult<Vec<Rational>> {
    objs.iter().map(rational).collect()
}

fn machine_config(speeds: &[Bound<'_, PyAny>]) -> PyResult<MachineConfig> {
    MachineConfig::new(rationals(speeds)?).map_err(value_error)
}

fn energy_params(alpha: &Bound<'_, PyAny>) -> PyResult<EnergyParams> {
    EnergyParams::new(rational(alpha)?).map_err(value_error)
}

/// A unit-task DAG together with its machine speeds.
#[pyclass(name = "Instance", module = "asymsched", frozen)]
pub struct PyInstance {
    inner: Instance,
}

#[pymethods]
impl PyInstance {
    #[new]
    fn new(n: usize, edges: Vec<(usize, usize)>, speeds: Vec<Bound<'_, PyAny>>) -> PyResult<Self> {
        let graph = TaskGraph::new(n, edges).map_err(value_error)?;
        Ok(PyInstance { inner: Instance::new(graph, machine_config(&speeds)?) })
    }

    /// Disjoint chains of the given lengths.
    #[staticmethod]
    fn from_chains(lengths: Vec<usize>, speeds: Vec<Bound<'_, PyAny>>) -> PyResult<Self> {
        Ok(PyInstance { inner: Instance::from_chain_lengths(&lengths, machine_config(&speeds)?) })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Instance::from_json(text).map(|inner| PyInstance { inner }).map_err(value_error)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn digest(&self) -> String {
        self.inner.digest()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    #[getter]
    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.graph.edges().to_vec()
    }

    #[getter]
    fn speeds<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyAny>>> {
        self.inner.config.speeds().iter().map(|&s| fraction(py, s)).collect()
    }

    #[getter]
    fn chains(&self) -> Vec<Vec<usize>> {
        self.inner.chains.chains().to_vec()
    }

    fn __repr__(&self) -> String {
        format!("Instance(n={}, m={}, edges={})", self.inner.n(), self.inner.m(), self.inner.graph.edges().len())
    }
}

/// Segments `(task, machine, start, end)`; a task may be split.
#[pyclass(name = "Schedule", module = "asymsched", frozen)]
pub struct PySchedule {
    inner: Schedule,
}

#[pymethods]
impl PySchedule {
    #[new]
    fn new(segments: Vec<(usize, usize, Bound<'_, PyAny>, Bound<'_, PyAny>)>) -> PyResult<Self> {
        let segments = segments
            .iter()
            .map(|(t, k, s, e)| Ok(Segment::new(*t, *k, rational(s)?, rational(e)?)))
            .collect::<PyResult<Vec<_>>>()?;
        Ok(PySchedule { inner: Schedule::new(segments).canonical() })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Schedule::from_json(text).map(|inner| PySchedule { inner }).map_err(value_error)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn segments<'py>(&self, py: Python<'py>) -> PyResult<Vec<(usize, usize, Bound<'py, PyAny>, Bound<'py, PyAny>)>> {
        self.inner
            .segments
            .iter()
            .map(|s| Ok((s.task, s.machine, fraction(py, s.start)?, fraction(py, s.end)?)))
            .collect()
    }

    fn makespan<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, self.inner.makespan())
    }

    /// Raises `InvalidScheduleError` with a diagnostic.
    fn validate(&self, instance: &PyInstance) -> PyResult<()> {
        self.inner.validate_for(&instance.inner).map_err(|e| InvalidScheduleError::new_err(e.to_string()))
    }

    /// Exact energy as a Fraction, or a float when `c^(alpha-1)` is irrational.
    fn energy<'py>(&self, py: Python<'py>, instance: &PyInstance, alpha: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
        let params = energy_params(alpha)?;
        energy_object(py, &energy_value(&self.inner, &instance.inner.config, &params))
    }

    fn __len__(&self) -> usize {
        self.inner.segments.len()
    }

    fn __repr__(&self) -> String {
        format!("Schedule(segments={}, makespan={})", self.inner.segments.len(), self.inner.makespan())
    }
}

/// Runs `remnants`, `lp-round`, `list` or `oracle`.
#[pyfunction]
#[pyo3(signature = (instance, algo, seed = 0, trials = None, a2 = false))]
fn solve(instance: &PyInstance, algo: &str, seed: u64, trials: Option<usize>, a2: bool) -> PyResult<PySchedule> {
    let algo: Algo = algo.parse().map_err(PyValueError::new_err)?;
    let options = SolveOptions { seed, trials, a2, ..SolveOptions::default() };
    let output = solve_instance(&instance.inner, algo, &options).map_err(solve_error)?;
    Ok(PySchedule { inner: output.schedule })
}

/// Lower bounds keyed by name; inapplicable bounds are `None`.
#[pyfunction]
fn bounds<'py>(py: Python<'py>, instance: &PyInstance) -> PyResult<Bound<'py, PyDict>> {
    let report = bound_report(&instance.inner);
    let dict = PyDict::new(py);
    dict.set_item("A", fraction(py, report.a)?)?;
    dict.set_item("B_general", fraction(py, report.b_general)?)?;
    dict.set_item("B_two_speed", report.b_two_speed.map(|q| fraction(py, q)).transpose()?)?;
    dict.set_item("single_fast", report.single_fast.map(|q| fraction(py, q)).transpose()?)?;
    dict.set_item("max_lower", fraction(py, report.max_lower)?)?;
    Ok(dict)
}

/// Exact optimal non-preemptive makespan (small instances only).
#[pyfunction]
fn optimal_makespan<'py>(py: Python<'py>, instance: &PyInstance) -> PyResult<Bound<'py, PyAny>> {
    let (t, _) = exact_optimal_schedule(&instance.inner, &OracleLimits::default()).map_err(|e| solve_error(e.into()))?;
    fraction(py, t)
}

#[pyfunction]
fn save_energy(instance: &PyInstance, schedule: &PySchedule, alpha: &Bound<'_, PyAny>) -> PyResult<PySchedule> {
    let params = energy_params(alpha)?;
    let inst = &instance.inner;
    schedule.inner.validate_for(inst).map_err(|e| InvalidScheduleError::new_err(e.to_string()))?;
    Ok(PySchedule { inner: save_energy_schedule(&schedule.inner, &inst.graph, &inst.config, &params) })
}

/// True when no single move of work onto a slower processor saves energy.
#[pyfunction]
fn is_locally_optimal(instance: &PyInstance, schedule: &PySchedule, alpha: &Bound<'_, PyAny>) -> PyResult<bool> {
    let params = energy_params(alpha)?;
    let inst = &instance.inner;
    Ok(verify_local_optimality(&schedule.inner, &inst.graph, &inst.config, &params).is_ok())
}

/// Moves a schedule for `m` machines of speed `speed` onto `target_speeds`.
#[pyfunction]
fn asymmetrize(schedule: &PySchedule, m: usize, speed: &Bound<'_, PyAny>, target_speeds: Vec<Bound<'_, PyAny>>) -> PyResult<PySchedule> {
    let sym = SymmetricConfig::new(m, rational(speed)?).map_err(value_error)?;
    let target = machine_config(&target_speeds)?;
    asymmetrize_schedule(&schedule.inner, &sym, &target).map(|inner| PySchedule { inner }).map_err(|e| match e {
        OracleError::InvalidSchedule(e) => InvalidScheduleError::new_err(e.to_string()),
        other => value_error(other),
    })
}

/// Random instance: `kind` is `chains`, `layered-dag` or `random-dag`.
#[pyfunction]
#[pyo3(signature = (kind, speeds, n = 0, r = None, widths = None, p = 0.5, seed = 0))]
fn generate(kind: &str, speeds: Vec<Bound<'_, PyAny>>, n: usize, r: Option<usize>, widths: Option<Vec<usize>>, p: f64, seed: u64) -> PyResult<PyInstance> {
    let spec = GeneratorSpec { kind: kind.parse().map_err(value_error)?, n, r, widths: widths.unwrap_or_default(), p, seed };
    generate_instance(&spec, machine_config(&speeds)?).map(|inner| PyInstance { inner }).map_err(value_error)
}

#[pymodule]
pub fn asymsched(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyInstance>()?;
    m.add_class::<PySchedule>()?;
    m.add("SizeGuardError", m.py().get_type::<SizeGuardError>())?;
    m.add("InvalidScheduleError", m.py().get_type::<InvalidScheduleError>())?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(bounds, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_makespan, m)?)?;
    m.add_function(wrap_pyfunction!(save_energy, m)?)?;
    m.add_function(wrap_pyfunction!(is_locally_optimal, m)?)?;
    m.add_function(wrap_pyfunction!(asymmetrize, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    Ok(())
}
