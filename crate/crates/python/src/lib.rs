//! Python bindings. Suites are passed as lists of test ids and scores come
//! back as `(numerator, denominator)` tuples so ties stay exact.

use std::collections::BTreeSet;
use std::path::PathBuf;

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use assent::metrics::{self, Metric, DEFAULT_COS_OPERATORS};
use assent::model::{self, CoverageKind, MutantId, RequirementId, Score, TestId};
use assent::rng::rng_from_seed;
use assent::run::{self, RunConfig};
use assent::stats::{self, Alternative};
use assent::synth::{generate, generate_named, SynthSpec};

fn py_err(e: assent::Error) -> PyErr {
    match e {
        assent::Error::Io { .. } => PyIOError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn ids<T: TryFrom<String, Error = assent::Error>>(v: Vec<String>) -> PyResult<Vec<T>> {
    v.into_iter().map(|s| T::try_from(s).map_err(py_err)).collect()
}

fn pair(s: Score) -> (u64, u64) {
    (s.numerator(), s.denominator())
}

#[pyclass(frozen, skip_from_py_object, module = "assent")]
#[derive(Clone)]
pub struct KillMatrix {
    inner: model::KillMatrix,
}

#[pymethods]
impl KillMatrix {
    #[new]
    fn new(tests: Vec<String>, mutants: Vec<String>, operators: Vec<String>, kills: Vec<Vec<bool>>) -> PyResult<Self> {
        let inner = model::KillMatrix::new(ids::<TestId>(tests)?, ids::<MutantId>(mutants)?, operators, &kills)
            .map_err(py_err)?;
        Ok(KillMatrix { inner })
    }

    #[getter]
    fn tests(&self) -> Vec<String> {
        self.inner.tests().iter().map(ToString::to_string).collect()
    }

    #[getter]
    fn mutants(&self) -> Vec<String> {
        self.inner.mutants().iter().map(ToString::to_string).collect()
    }

    #[getter]
    fn operators(&self) -> Vec<String> {
        self.inner.operators().to_vec()
    }

    /// Mutant ids killed by the given tests.
    fn killed(&self, suite: Vec<String>) -> PyResult<Vec<String>> {
        let suite = self.inner.suite(suite).map_err(py_err)?;
        Ok(self.inner.killed_set(&suite).into_iter().map(|m| m.to_string()).collect())
    }

    fn __repr__(&self) -> String {
        format!("KillMatrix({} tests x {} mutants)", self.inner.num_tests(), self.inner.num_mutants())
    }
}

#[pyclass(frozen, skip_from_py_object, module = "assent")]
#[derive(Clone)]
pub struct CoverageMatrix {
    inner: model::CoverageMatrix,
}

#[pymethods]
impl CoverageMatrix {
    /// `kind` is "statement" or "branch".
    #[new]
    fn new(tests: Vec<String>, requirements: Vec<String>, kind: &str, covered: Vec<Vec<bool>>) -> PyResult<Self> {
        let kind = match kind {
            "statement" => CoverageKind::Statement,
            "branch" => CoverageKind::Branch,
            other => return Err(PyValueError::new_err(format!("unknown coverage kind `{other}`"))),
        };
        let inner =
            model::CoverageMatrix::new(ids::<TestId>(tests)?, ids::<RequirementId>(requirements)?, kind, &covered)
                .map_err(py_err)?;
        Ok(CoverageMatrix { inner })
    }

    #[getter]
    fn kind(&self) -> String {
        self.inner.kind().to_string()
    }

    #[getter]
    fn requirements(&self) -> Vec<String> {
        self.inner.requirements().iter().map(ToString::to_string).collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "CoverageMatrix({}, {} tests x {} requirements)",
            self.inner.kind(),
            self.inner.tests().len(),
            self.inner.num_requirements()
        )
    }
}

#[pyclass(frozen, from_py_object, module = "assent")]
#[derive(Clone)]
pub struct ProjectBundle {
    inner: model::ProjectBundle,
}

#[pymethods]
impl ProjectBundle {
    #[getter]
    fn id(&self) -> String {
        self.inner.id().to_string()
    }

    #[getter]
    fn kill(&self) -> KillMatrix {
        KillMatrix {
            inner: self.inner.kill().clone(),
        }
    }

    #[getter]
    fn statements(&self) -> CoverageMatrix {
        CoverageMatrix {
            inner: self.inner.statements().clone(),
        }
    }

    #[getter]
    fn branches(&self) -> CoverageMatrix {
        CoverageMatrix {
            inner: self.inner.branches().clone(),
        }
    }

    /// `[(fault_id, [triggering test ids])]`
    #[getter]
    fn faults(&self) -> Vec<(String, Vec<String>)> {
        self.inner
            .faults()
            .iter()
            .map(|f| (f.fault_id().to_string(), f.triggering().iter().map(ToString::to_string).collect()))
            .collect()
    }

    /// Writes the project's CSV files into `dir`.
    fn write(&self, dir: PathBuf) -> PyResult<()> {
        assent::io::write_project(&dir, &self.inner).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("ProjectBundle({:?}, {} faults)", self.inner.id(), self.inner.faults().len())
    }
}

#[pyfunction]
fn load_project(dir: PathBuf) -> PyResult<ProjectBundle> {
    Ok(ProjectBundle {
        inner: assent::io::load_project(&dir).map_err(py_err)?,
    })
}

#[pyfunction]
#[pyo3(signature = (seed, tests=40, mutants=200, faults=8, planted_op=0.75, planted_sc=None, planted_bc=None, triggering_per_fault=1, name=None))]
#[allow(clippy::too_many_arguments)]
fn synth(
    seed: u64,
    tests: usize,
    mutants: usize,
    faults: usize,
    planted_op: f64,
    planted_sc: Option<f64>,
    planted_bc: Option<f64>,
    triggering_per_fault: usize,
    name: Option<String>,
) -> PyResult<ProjectBundle> {
    let spec = SynthSpec {
        seed,
        num_tests: tests,
        num_mutants: mutants,
        num_faults: faults,
        planted_ms_op: planted_op,
        planted_sc_op: planted_sc.unwrap_or(planted_op),
        planted_bc_op: planted_bc.unwrap_or(planted_op),
        triggering_per_fault,
        ..SynthSpec::default()
    };
    let inner = match name {
        Some(n) => generate_named(&spec, &n),
        None => generate(&spec),
    }
    .map_err(py_err)?;
    Ok(ProjectBundle { inner })
}

fn cos_ops(ops: Option<Vec<String>>) -> BTreeSet<String> {
    ops.unwrap_or_else(|| DEFAULT_COS_OPERATORS.map(String::from).to_vec())
        .into_iter()
        .collect()
}

#[pyfunction]
fn mutation_score(kill: &KillMatrix, suite: Vec<String>) -> PyResult<(u64, u64)> {
    let s = kill.inner.suite(suite).map_err(py_err)?;
    metrics::mutation_score(&kill.inner, &s).map(pair).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (kill, suite, operators=None))]
fn cos_score(kill: &KillMatrix, suite: Vec<String>, operators: Option<Vec<String>>) -> PyResult<(u64, u64)> {
    let s = kill.inner.suite(suite).map_err(py_err)?;
    metrics::cos_score(&kill.inner, &s, &cos_ops(operators)).map(pair).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (kill, suite, percent=30, seed=0))]
fn rms_score(kill: &KillMatrix, suite: Vec<String>, percent: u32, seed: u64) -> PyResult<(u64, u64)> {
    let s = kill.inner.suite(suite).map_err(py_err)?;
    metrics::rms_score(&kill.inner, &s, percent, &mut rng_from_seed(seed)).map(pair).map_err(py_err)
}

#[pyfunction]
fn sms_score(kill: &KillMatrix, suite: Vec<String>) -> PyResult<(u64, u64)> {
    let s = kill.inner.suite(suite).map_err(py_err)?;
    metrics::sms_score(&kill.inner, &s).map(pair).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (kill, suite, seed=0, max_iters=100))]
fn cms_score(kill: &KillMatrix, suite: Vec<String>, seed: u64, max_iters: usize) -> PyResult<(u64, u64)> {
    let s = kill.inner.suite(suite).map_err(py_err)?;
    metrics::cms_score(&kill.inner, &s, max_iters, &mut rng_from_seed(seed)).map(pair).map_err(py_err)
}

#[pyfunction]
fn coverage_score(coverage: &CoverageMatrix, suite: Vec<String>) -> PyResult<(u64, u64)> {
    let s = coverage.inner.suite(suite).map_err(py_err)?;
    metrics::coverage_score(&coverage.inner, &s).map(pair).map_err(py_err)
}

/// Mutant ids of the subsuming set.
#[pyfunction]
fn subsuming_set(kill: &KillMatrix) -> Vec<String> {
    metrics::subsuming_set(&kill.inner).ids(&kill.inner).into_iter().map(|m| m.to_string()).collect()
}

/// Order preservation per project and metric:
/// `[{"project", "metric", "preserved", "total", "op"}]`, sorted by project.
#[pyfunction]
#[pyo3(signature = (bundles, metrics=None, ground_truth="real", pairs="per-fault", repetitions=20, rms_percent=30, cos_operators=None, seed=0))]
#[allow(clippy::too_many_arguments)]
fn evaluate(
    py: Python<'_>,
    bundles: Vec<ProjectBundle>,
    metrics: Option<Vec<String>>,
    ground_truth: &str,
    pairs: &str,
    repetitions: u32,
    rms_percent: u32,
    cos_operators: Option<Vec<String>>,
    seed: u64,
) -> PyResult<Vec<Py<pyo3::types::PyDict>>> {
    let metrics = match metrics {
        Some(names) => names.iter().map(|n| n.parse::<Metric>()).collect::<Result<Vec<_>, _>>().map_err(py_err)?,
        None => RunConfig::default().metrics,
    };
    let cfg = RunConfig {
        metrics,
        ground_truth: ground_truth.parse().map_err(py_err)?,
        repetitions,
        rms_percent,
        cos_operators: cos_ops(cos_operators),
        seed,
        pairs: pairs.parse().map_err(py_err)?,
        ..RunConfig::default()
    };
    let inner: Vec<model::ProjectBundle> = bundles.into_iter().map(|b| b.inner).collect();
    let evaluation = py.detach(|| run::evaluate(&inner, &cfg, None)).map_err(py_err)?;
    let mut out = Vec::new();
    for row in &evaluation.table.rows {
        for r in &row.reports {
            let (num, den) = r.op_fraction();
            let d = pyo3::types::PyDict::new(py);
            d.set_item("project", &row.project)?;
            d.set_item("metric", r.metric.name())?;
            d.set_item("preserved", num)?;
            d.set_item("total", den)?;
            d.set_item("op", r.op_value())?;
            out.push(d.unbind());
        }
    }
    Ok(out)
}

#[pyfunction]
#[pyo3(signature = (a, b, alternative="two-sided"))]
fn wilcoxon(a: Vec<f64>, b: Vec<f64>, alternative: &str) -> PyResult<f64> {
    let alt: Alternative = alternative.parse().map_err(py_err)?;
    Ok(stats::wilcoxon_signed_rank_test(&a, &b, alt).map_err(py_err)?.p_value)
}

#[pyfunction]
fn benjamini_hochberg(pvalues: Vec<f64>) -> PyResult<Vec<f64>> {
    stats::benjamini_hochberg(&pvalues).map_err(py_err)
}

/// `(delta, magnitude)`
#[pyfunction]
fn cliffs_delta(a: Vec<f64>, b: Vec<f64>) -> PyResult<(f64, String)> {
    let (d, m) = stats::cliffs_delta(&a, &b).map_err(py_err)?;
    Ok((d, m.to_string()))
}

/// Change rate of two decimal strings, e.g. `change_rate("0.889", "0.778") == "+14%"`.
#[pyfunction]
fn change_rate(op_alt: &str, op_real: &str) -> PyResult<String> {
    let alt = stats::parse_decimal(op_alt).map_err(py_err)?;
    let real = stats::parse_decimal(op_real).map_err(py_err)?;
    Ok(stats::change_rate(&alt, &real).map_err(py_err)?.to_string())
}

#[pymodule]
#[pyo3(name = "assent")]
fn assent_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<KillMatrix>()?;
    m.add_class::<CoverageMatrix>()?;
    m.add_class::<ProjectBundle>()?;
    m.add_function(wrap_pyfunction!(load_project, m)?)?;
    m.add_function(wrap_pyfunction!(synth, m)?)?;
    m.add_function(wrap_pyfunction!(mutation_score, m)?)?;
    m.add_function(wrap_pyfunction!(cos_score, m)?)?;
    m.add_function(wrap_pyfunction!(rms_score, m)?)?;
    m.add_function(wrap_pyfunction!(sms_score, m)?)?;
    m.add_function(wrap_pyfunction!(cms_score, m)?)?;
    m.add_function(wrap_pyfunction!(coverage_score, m)?)?;
    m.add_function(wrap_pyfunction!(subsuming_set, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(wilcoxon, m)?)?;
    m.add_function(wrap_pyfunction!(benjamini_hochberg, m)?)?;
    m.add_function(wrap_pyfunction!(cliffs_delta, m)?)?;
    m.add_function(wrap_pyfunction!(change_rate, m)?)?;
    Ok(())
}
