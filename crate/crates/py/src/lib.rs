//! Python bindings. Instances cross the boundary as the canonical JSON text;
//! verdicts and reports come back as plain dicts.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde_json::{json, Value};

use gapkit::barrier::{gadget_gap as core_gadget_gap, verify_barrier, GadgetTables, GapReport};
use gapkit::bench::implied_gap as core_implied_gap;
use gapkit::instances::{
    generate as core_generate, parse_instance, serialize_instance, BcpGen, CnfGen, GenSpec,
    Instance as CoreInstance, Label, LatticeGen, SubsetQueryGen,
};
use gapkit::metric::{Gamma, NormKind};
use gapkit::oracles::{
    oracle_closest_pair, oracle_lattice01, oracle_sat, oracle_subset_query, OracleVerdict, Witness,
};
use gapkit::reductions::{
    embed_subsetquery_to_bcp, parse_rational, reduce_ksat_to_bisq, reduce_lattice01_to_bcp,
    select_batch_size, EmbeddingOrientation,
};
use gapkit::solvers::{bcp_solve, svp01_mitm, BcpStrategy, SolveOutcome};
use gapkit::Error;

fn err(e: Error) -> PyErr {
    match e {
        Error::OverBudget { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn parse<T: std::str::FromStr>(s: &str, what: &str) -> PyResult<T> {
    s.parse().map_err(|_| PyValueError::new_err(format!("invalid {what}: '{s}'")))
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (v.to_string(),))
}

/// A validated problem instance.
#[pyclass(name = "Instance", module = "gapkit_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyInstance {
    inner: CoreInstance,
}

#[pymethods]
impl PyInstance {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: parse_instance(text.as_bytes()).map_err(err)?,
        })
    }

    fn to_json(&self) -> String {
        serialize_instance(&self.inner)
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind().as_str()
    }

    fn __repr__(&self) -> String {
        format!("Instance(kind='{}')", self.kind())
    }
}

impl From<CoreInstance> for PyInstance {
    fn from(inner: CoreInstance) -> Self {
        Self { inner }
    }
}

/// Generate a seeded instance with a certified label.
#[pyfunction]
#[pyo3(signature = (problem, n, *, dim=None, p="inf", label="yes", r=4, gamma="2", k=3, m=None, seed=0))]
#[allow(clippy::too_many_arguments)]
fn generate(
    problem: &str,
    n: usize,
    dim: Option<usize>,
    p: &str,
    label: &str,
    r: u64,
    gamma: &str,
    k: usize,
    m: Option<usize>,
    seed: u64,
) -> PyResult<PyInstance> {
    let p: NormKind = parse(p, "norm")?;
    let label: Label = parse(label, "label")?;
    let gamma: Gamma = parse(gamma, "gamma")?;
    let spec = match problem {
        "svp01" | "cvp01" => {
            let mut g = LatticeGen::new(n, p, label);
            g.dim = dim;
            g.r = r;
            g.gamma = gamma;
            g.cvp = problem == "cvp01";
            GenSpec::Lattice01(g)
        }
        "bcp" => {
            let mut g = BcpGen::new(n, dim.unwrap_or(4), p, label);
            g.r = r;
            g.gamma = gamma;
            GenSpec::Bcp(g)
        }
        "subsetquery" => GenSpec::SubsetQuery(SubsetQueryGen::new(n, dim.unwrap_or(16), label)),
        "cnf" => GenSpec::Cnf(CnfGen {
            n,
            m: m.unwrap_or((n * 426).div_ceil(100)),
            k,
        }),
        other => return Err(PyValueError::new_err(format!("unknown problem '{other}'"))),
    };
    Ok(core_generate(&spec, seed).map_err(err)?.into())
}

fn oracle_json(v: OracleVerdict) -> Value {
    json!({
        "label": v.label.as_str(),
        "witness": v.witness,
        "exact_min": v.exact_min.map(|m| m.to_rational().to_string()),
        "enumerated": v.enumerated,
    })
}

fn outcome_json(o: SolveOutcome) -> Value {
    json!({ "label": o.label.as_str(), "witness": o.witness, "counters": o.counters })
}

/// Exhaustive reference answer.
#[pyfunction]
fn oracle<'py>(py: Python<'py>, instance: &PyInstance) -> PyResult<Bound<'py, PyAny>> {
    let v = match &instance.inner {
        CoreInstance::Bcp(b) => oracle_closest_pair(b),
        CoreInstance::Lattice01(l) => oracle_lattice01(l).map_err(err)?,
        CoreInstance::SubsetQuery(s) => oracle_subset_query(s),
        CoreInstance::Cnf(c) => oracle_sat(c).map_err(err)?,
        other => {
            return Err(PyValueError::new_err(format!("no oracle for '{}'", other.kind().as_str())))
        }
    };
    to_py(py, &oracle_json(v))
}

/// Decide with the default fast solver for the instance kind: brute or
/// pruned closest pair, meet in the middle, the subset-query embedding, or
/// split-and-list.
#[pyfunction]
#[pyo3(signature = (instance, strategy="brute"))]
fn solve<'py>(py: Python<'py>, instance: &PyInstance, strategy: &str) -> PyResult<Bound<'py, PyAny>> {
    let backend: BcpStrategy = parse(strategy, "strategy")?;
    let v = match &instance.inner {
        CoreInstance::Bcp(b) => outcome_json(bcp_solve(b, backend).map_err(err)?),
        CoreInstance::Lattice01(l) => outcome_json(svp01_mitm(l, backend).map_err(err)?),
        CoreInstance::SubsetQuery(s) => {
            let bcp = embed_subsetquery_to_bcp(s, EmbeddingOrientation::Corrected).map_err(err)?;
            let mut out = bcp_solve(&bcp, backend).map_err(err)?;
            out.witness = match out.witness {
                Some(Witness::Pair { a, b }) => Some(Witness::Containment { subset: b, superset: a }),
                w => w,
            };
            outcome_json(out)
        }
        CoreInstance::Cnf(c) => {
            let family = reduce_ksat_to_bisq(c).map_err(err)?;
            let bcp = embed_subsetquery_to_bcp(&family.instances[0], EmbeddingOrientation::Corrected)
                .map_err(err)?;
            let mut out = bcp_solve(&bcp, backend).map_err(err)?;
            if let Some(Witness::Pair { a, b }) = out.witness {
                out.witness = Some(Witness::Assignment(family.lift_assignment(0, a, b).map_err(err)?));
            }
            outcome_json(out)
        }
        other => {
            return Err(PyValueError::new_err(format!("no solver for '{}'", other.kind().as_str())))
        }
    };
    to_py(py, &v)
}

/// Apply a reduction. Returns `(instances, recombination, provenance)`.
#[pyfunction]
#[pyo3(signature = (instance, kind, orientation="corrected"))]
fn reduce<'py>(
    py: Python<'py>,
    instance: &PyInstance,
    kind: &str,
    orientation: &str,
) -> PyResult<(Vec<PyInstance>, String, Bound<'py, PyAny>)> {
    let orientation: EmbeddingOrientation = parse(orientation, "orientation")?;
    let wrong = || PyValueError::new_err(format!("'{kind}' does not accept '{}'", instance.kind()));
    let (instances, recombination, provenance): (Vec<CoreInstance>, _, Value) = match (kind, &instance.inner) {
        ("lattice-bcp", CoreInstance::Lattice01(l)) => {
            let out = reduce_lattice01_to_bcp(l).map_err(err)?;
            (out.instances.into_iter().map(Into::into).collect(), out.recombination, json!(out.provenance))
        }
        ("ksat-bsq", CoreInstance::Cnf(c)) => {
            let out = reduce_ksat_to_bisq(c).map_err(err)?;
            (out.instances.into_iter().map(Into::into).collect(), out.recombination, json!(out.provenance))
        }
        ("bsq-bcp", CoreInstance::SubsetQuery(s)) => {
            let bcp = embed_subsetquery_to_bcp(s, orientation).map_err(err)?;
            (vec![bcp.into()], gapkit::reductions::Recombination::Single, Value::Null)
        }
        _ => return Err(wrong()),
    };
    let recombination = json!(recombination).as_str().unwrap_or_default().to_owned();
    Ok((
        instances.into_iter().map(PyInstance::from).collect(),
        recombination,
        to_py(py, &provenance)?,
    ))
}

/// γ = 1 + 2/(k−1) as an exact fraction string.
#[pyfunction]
fn implied_gap(k: u64) -> PyResult<String> {
    Ok(core_implied_gap(k).map_err(err)?.to_string())
}

/// Batch size for the ANN-to-closest-pair reduction.
#[pyfunction]
fn batch_size<'py>(py: Python<'py>, n: u64, c: &str, delta: &str, delta_prime: &str) -> PyResult<Bound<'py, PyAny>> {
    let q = |s: &str| parse_rational(s).map_err(err);
    let choice = select_batch_size(n, &q(c)?, &q(delta)?, &q(delta_prime)?).map_err(err)?;
    to_py(
        py,
        &json!({
            "ell": choice.ell,
            "lower_exponent": choice.lower_exponent.to_string(),
            "upper_exponent": choice.upper_exponent.to_string(),
            "preprocessing": choice.preprocessing.to_string(),
            "query": choice.query.to_string(),
        }),
    )
}

fn report_json(r: &GapReport) -> Value {
    json!({
        "yes_max": r.yes_max.to_rational().to_string(),
        "yes_witness": [r.yes_witness.s, r.yes_witness.t],
        "no_min": r.no_min.to_rational().to_string(),
        "no_witness": [r.no_witness.s, r.no_witness.t],
        "gap": r.gap.to_string(),
    })
}

/// Gap of a disjointness gadget given as JSON.
#[pyfunction]
fn gadget_gap<'py>(py: Python<'py>, gadget_json: &str) -> PyResult<Bound<'py, PyAny>> {
    let g = GadgetTables::from_json(gadget_json).map_err(err)?;
    to_py(py, &report_json(&core_gadget_gap(&g).map_err(err)?))
}

/// Whether the gadget respects the gap-3 bound.
#[pyfunction]
fn gadget_holds(gadget_json: &str) -> PyResult<bool> {
    let g = GadgetTables::from_json(gadget_json).map_err(err)?;
    Ok(verify_barrier(&g).map_err(err)?.holds)
}

#[pymodule]
fn gapkit_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyInstance>()?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(oracle, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(reduce, m)?)?;
    m.add_function(wrap_pyfunction!(implied_gap, m)?)?;
    m.add_function(wrap_pyfunction!(batch_size, m)?)?;
    m.add_function(wrap_pyfunction!(gadget_gap, m)?)?;
    m.add_function(wrap_pyfunction!(gadget_holds, m)?)?;
    Ok(())
}
