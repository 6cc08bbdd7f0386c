//! Python bindings: task compilation, dataset generation and I/O, belief
//! propagation engines, oracle evaluation and calibration helpers.

use std::path::PathBuf;

use ltlzinc::automata::{ltlf_to_dfa, Dfa as CoreDfa};
use ltlzinc::inference::{
    self, BeliefState, Engine as CoreEngine, EngineKind, OracleConfig, OracleKind, OracleTarget,
};
use ltlzinc::ltlf::{parse_ltlf, trace_satisfies};
use ltlzinc::taskgen::{self, CompiledTask, Split, TaskSpec};
use ltlzinc::Error;
use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io(e) => PyOSError::new_err(e.to_string()),
        e @ (Error::Syntax { .. }
        | Error::UnknownToken { .. }
        | Error::Domain(_)
        | Error::Parse { .. }
        | Error::Compile(_)) => PyValueError::new_err(e.to_string()),
        e => PyRuntimeError::new_err(e.to_string()),
    }
}

fn parse_split(s: &str) -> PyResult<Split> {
    Split::parse(s).ok_or_else(|| PyValueError::new_err(format!("unknown split `{s}`; expected train, val or test")))
}

/// Serializable value → plain Python objects via `json.loads`.
fn to_python<T: serde::Serialize>(py: Python<'_>, v: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

/// Canonical rendering of an LTLf formula.
#[pyfunction]
fn parse_formula(text: &str) -> PyResult<String> {
    parse_ltlf(text).map(|f| f.to_string()).map_err(py_err)
}

/// Whether a non-empty trace of letters (bit `i` = atom `i`) satisfies `formula`.
#[pyfunction]
fn satisfies(formula: &str, atoms: Vec<String>, trace: Vec<u32>) -> PyResult<bool> {
    let f = parse_ltlf(formula).map_err(py_err)?;
    Ok(trace_satisfies(&f, &atoms, &trace))
}

/// Minimal DFA of an LTLf formula over an atom alphabet.
#[pyclass(frozen, skip_from_py_object, name = "Dfa")]
#[derive(Clone)]
struct PyDfa(CoreDfa);

#[pymethods]
impl PyDfa {
    #[staticmethod]
    fn from_formula(formula: &str, atoms: Vec<String>) -> PyResult<Self> {
        let f = parse_ltlf(formula).map_err(py_err)?;
        ltlf_to_dfa(&f, &atoms).map(PyDfa).map_err(py_err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        CoreDfa::from_json(text).map(PyDfa).map_err(py_err)
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    #[getter]
    fn atoms(&self) -> Vec<String> {
        self.0.atoms().to_vec()
    }

    #[getter]
    fn num_states(&self) -> usize {
        self.0.num_states()
    }

    #[getter]
    fn initial(&self) -> usize {
        self.0.initial()
    }

    #[getter]
    fn accepting(&self) -> Vec<usize> {
        self.0.accepting_states()
    }

    fn next(&self, state: usize, letter: u32) -> PyResult<usize> {
        if state >= self.0.num_states() || letter as usize >= self.0.num_letters() {
            return Err(PyValueError::new_err("state or letter out of range"));
        }
        Ok(self.0.next(state, letter))
    }

    /// States visited after each letter.
    fn run(&self, trace: Vec<u32>) -> PyResult<Vec<usize>> {
        self.0.run(&trace).map_err(py_err)
    }

    fn accepts(&self, trace: Vec<u32>) -> PyResult<bool> {
        self.0.accepts(&trace).map_err(py_err)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }

    fn __repr__(&self) -> String {
        format!("Dfa(states={}, atoms={:?})", self.0.num_states(), self.0.atoms())
    }
}

/// A compiled generation task.
#[pyclass(frozen, name = "Task")]
struct PyTask(CompiledTask);

#[pymethods]
impl PyTask {
    /// One of the built-in tasks (`task1` … `task6`).
    #[staticmethod]
    fn builtin(name: &str) -> PyResult<Self> {
        let spec = taskgen::builtin_task(name).ok_or_else(|| {
            PyValueError::new_err(format!("unknown task `{name}`; built-in tasks: {}", taskgen::BUILTIN_TASKS.join(", ")))
        })?;
        Self::compile(&spec)
    }

    #[staticmethod]
    fn from_yaml(text: &str) -> PyResult<Self> {
        Self::compile(&TaskSpec::from_yaml(text).map_err(py_err)?)
    }

    #[getter]
    fn name(&self) -> String {
        self.0.spec().name.clone()
    }

    #[getter]
    fn formula(&self) -> String {
        self.0.formula().to_string()
    }

    #[getter]
    fn atoms(&self) -> Vec<String> {
        self.0.atoms().to_vec()
    }

    #[getter]
    fn dfa(&self) -> PyDfa {
        PyDfa(self.0.dfa().clone())
    }

    #[getter]
    fn spec_hash(&self) -> String {
        self.0.spec().hash()
    }

    fn to_yaml(&self) -> String {
        self.0.spec().to_yaml()
    }

    /// `(source, target, guard)` for every non-self-loop transition.
    fn guards(&self) -> Vec<(usize, usize, String)> {
        self.0.guard_table()
    }

    /// Satisfaction probability of each constraint under independent
    /// per-variable distributions.
    fn constraint_probabilities(&self, dists: Vec<Vec<f64>>) -> PyResult<Vec<f64>> {
        self.0.constraint_probabilities(&dists).map_err(py_err)
    }

    /// Generates a dataset, optionally overriding seed, ratio and split sizes.
    #[pyo3(signature = (seed=None, positive_ratio=None, train=None, val=None, test=None))]
    fn generate(
        &self,
        py: Python<'_>,
        seed: Option<u64>,
        positive_ratio: Option<f64>,
        train: Option<usize>,
        val: Option<usize>,
        test: Option<usize>,
    ) -> PyResult<PyDataset> {
        let mut spec = self.0.spec().clone();
        spec.seed = seed.unwrap_or(spec.seed);
        spec.positive_ratio = positive_ratio.unwrap_or(spec.positive_ratio);
        spec.splits.train = train.unwrap_or(spec.splits.train);
        spec.splits.val = val.unwrap_or(spec.splits.val);
        spec.splits.test = test.unwrap_or(spec.splits.test);
        let ds = py.detach(|| taskgen::generate_dataset(&spec)).map_err(py_err)?;
        Ok(PyDataset(ds))
    }

    fn __repr__(&self) -> String {
        format!("Task({:?}, formula={:?})", self.0.spec().name, self.0.formula().to_string())
    }
}

impl PyTask {
    fn compile(spec: &TaskSpec) -> PyResult<Self> {
        taskgen::compile_task(spec).map(PyTask).map_err(py_err)
    }
}

/// A generated or loaded dataset.
#[pyclass(frozen, name = "Dataset")]
struct PyDataset(taskgen::Dataset);

#[pymethods]
impl PyDataset {
    #[staticmethod]
    #[pyo3(signature = (path, verify=false))]
    fn read(path: PathBuf, verify: bool) -> PyResult<Self> {
        taskgen::read_dataset(&path, verify).map(PyDataset).map_err(py_err)
    }

    /// Writes the CSV and its JSON sidecar.
    fn write(&self, path: PathBuf) -> PyResult<()> {
        taskgen::write_dataset(&self.0, &path).map_err(py_err)
    }

    /// The task compiled from the dataset's spec.
    fn task(&self) -> PyResult<PyTask> {
        PyTask::compile(&self.0.spec)
    }

    #[getter]
    fn task_name(&self) -> String {
        self.0.spec.name.clone()
    }

    #[getter]
    fn spec_hash(&self) -> String {
        self.0.spec_hash.clone()
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.0.seed
    }

    fn __len__(&self) -> usize {
        self.0.splits.iter().map(Vec::len).sum()
    }

    /// Samples of one split as dicts with `seq_id`, `values`, `letters`,
    /// `states` and `label`.
    #[pyo3(signature = (split="train"))]
    fn samples<'py>(&self, py: Python<'py>, split: &str) -> PyResult<Vec<Bound<'py, PyDict>>> {
        self.0
            .split(parse_split(split)?)
            .iter()
            .map(|s| {
                let d = PyDict::new(py);
                d.set_item("seq_id", s.seq_id)?;
                d.set_item("values", s.values.clone())?;
                d.set_item("letters", s.letters.clone())?;
                d.set_item("states", s.states.clone())?;
                d.set_item("label", s.label)?;
                d.set_item("image_indices", s.image_indices.clone())?;
                Ok(d)
            })
            .collect()
    }

    /// Majority-prediction baselines `(successor, sequence)` on the test split.
    fn baselines(&self) -> PyResult<(f64, f64)> {
        inference::mp_baselines(&self.0).map_err(py_err)
    }
}

/// A belief-propagation engine over a DFA.
#[pyclass(frozen, name = "Engine")]
struct PyEngine(CoreEngine);

#[pymethods]
impl PyEngine {
    #[new]
    fn new(kind: &str, dfa: &PyDfa) -> PyResult<Self> {
        let kind: EngineKind = kind.parse().map_err(py_err)?;
        CoreEngine::new(kind, &dfa.0).map(PyEngine).map_err(py_err)
    }

    #[staticmethod]
    fn kinds() -> Vec<&'static str> {
        EngineKind::ALL.iter().map(|k| k.as_str()).collect()
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.0.kind().as_str()
    }

    fn initial(&self) -> Vec<f64> {
        self.0.initial().0
    }

    /// One update: returns `(belief, mass)`.
    fn step(&self, belief: Vec<f64>, constraint_beliefs: Vec<f64>) -> PyResult<(Vec<f64>, f64)> {
        let s = self.0.step(&BeliefState(belief), &constraint_beliefs).map_err(py_err)?;
        Ok((s.belief.0, s.mass))
    }

    /// Runs a whole trace of constraint beliefs; returns a dict with
    /// `beliefs`, `masses` and `acceptance`.
    fn run<'py>(&self, py: Python<'py>, trace: Vec<Vec<f64>>) -> PyResult<Bound<'py, PyDict>> {
        let r = self.0.run_sequence(&trace).map_err(py_err)?;
        let d = PyDict::new(py);
        d.set_item("beliefs", r.beliefs.into_iter().map(|b| b.0).collect::<Vec<_>>())?;
        d.set_item("masses", r.masses)?;
        d.set_item("acceptance", r.acceptance)?;
        Ok(d)
    }
}

/// Evaluates `engine` on a split of `dataset` with simulated perception.
/// `task` defaults to the dataset's own spec. Returns nested dicts.
#[pyfunction]
#[pyo3(signature = (dataset, engine, oracle="perfect", target="IC+CC", p=0.0, seed=12345, split="test", calibrate=false, task=None))]
#[allow(clippy::too_many_arguments)]
fn evaluate(
    py: Python<'_>,
    dataset: &PyDataset,
    engine: &PyEngine,
    oracle: &str,
    target: &str,
    p: f64,
    seed: u64,
    split: &str,
    calibrate: bool,
    task: Option<&PyTask>,
) -> PyResult<Py<PyAny>> {
    let kind: OracleKind = oracle.parse().map_err(py_err)?;
    let target: OracleTarget = target.parse().map_err(py_err)?;
    let cfg = OracleConfig::new(target, kind, p, seed).map_err(py_err)?;
    let split = parse_split(split)?;
    let own;
    let task = match task {
        Some(t) => &t.0,
        None => {
            own = dataset.task()?;
            &own.0
        }
    };
    let ev = py
        .detach(|| inference::evaluate(task, &dataset.0, split, &engine.0, &cfg, calibrate))
        .map_err(py_err)?;
    to_python(py, &ev)
}

#[pyfunction]
fn semantic_loss(preds: Vec<f64>, labels: Vec<u8>) -> PyResult<f64> {
    inference::semantic_loss(&preds, &labels).map_err(py_err)
}

#[pyfunction]
fn apply_temperature(p: f64, temperature: f64) -> PyResult<f64> {
    inference::apply_temperature(p, temperature).map_err(py_err)
}

#[pyfunction]
fn apply_temperature_vector(belief: Vec<f64>, temperature: f64) -> PyResult<Vec<f64>> {
    inference::apply_temperature_vector(&belief, temperature).map_err(py_err)
}

/// Fits a scalar temperature to `(probability, truth)` pairs.
#[pyfunction]
fn calibrate_temperature(py: Python<'_>, values: Vec<(f64, bool)>) -> PyResult<Py<PyAny>> {
    let c = inference::calibrate_temperature(&values).map_err(py_err)?;
    to_python(py, &c)
}

#[pymodule]
fn pyltlzinc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDfa>()?;
    m.add_class::<PyTask>()?;
    m.add_class::<PyDataset>()?;
    m.add_class::<PyEngine>()?;
    m.add_function(wrap_pyfunction!(parse_formula, m)?)?;
    m.add_function(wrap_pyfunction!(satisfies, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(semantic_loss, m)?)?;
    m.add_function(wrap_pyfunction!(apply_temperature, m)?)?;
    m.add_function(wrap_pyfunction!(apply_temperature_vector, m)?)?;
    m.add_function(wrap_pyfunction!(calibrate_temperature, m)?)?;
    m.add("BUILTIN_TASKS", taskgen::BUILTIN_TASKS.to_vec())?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
