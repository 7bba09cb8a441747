//! Python bindings: host graphs, regular-subgraph extraction, exact oracles,
//! and the synthetic constructions, exposed as the `regulus_py` module.
//!
//! Errors map onto Python exceptions: invalid inputs raise `ValueError`,
//! failed routes and exhausted budgets raise `RuntimeError`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use regulus::almostreg::{almost_regular_subgraph, regular_by_regularization};
use regulus::config::stage_rng;
use regulus::construct::{gen_large_r, gen_small_r, ConstructionKind, ConstructionSpec};
use regulus::graph::degree_summary;
use regulus::oracle::{
    check_regular_witness, find_regular_subgraph_exact, max_regular_degree as lib_max_regular,
    DegreeVerdict, SearchVerdict,
};
use regulus::pipeline::{erdos_sauer, hyper_route};
use regulus::{ConstantsConfig, SearchBudget, SubgraphWitness};

fn to_py(e: regulus::Error) -> PyErr {
    use regulus::Error;
    match e {
        Error::RouteFailed(_) | Error::LasVegas { .. } | Error::Budget(_) | Error::Internal(_) => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// An undirected simple graph with vertices `0..n`.
#[pyclass(frozen, name = "Graph")]
struct PyGraph {
    inner: regulus::Graph,
}

#[pymethods]
impl PyGraph {
    #[new]
    fn new(n: usize, edges: Vec<(u32, u32)>) -> PyResult<Self> {
        Ok(PyGraph { inner: regulus::Graph::new(n, edges).map_err(to_py)? })
    }

    #[getter]
    fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn edges(&self) -> Vec<(u32, u32)> {
        self.inner.edges().to_vec()
    }

    fn degree(&self, v: u32) -> PyResult<usize> {
        if v as usize >= self.inner.vertex_count() {
            return Err(PyValueError::new_err(format!("vertex {v} out of range")));
        }
        Ok(self.inner.degree(v))
    }

    fn avg_degree(&self) -> f64 {
        self.inner.avg_degree()
    }

    /// Serializes to the text format the CLI reads and writes.
    fn to_text(&self) -> String {
        regulus::graph::write_graph(&self.inner)
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(PyGraph { inner: regulus::graph::parse_graph(text).map_err(to_py)? })
    }

    fn __repr__(&self) -> String {
        format!("Graph(n={}, m={})", self.inner.vertex_count(), self.inner.edge_count())
    }
}

/// An extracted subgraph plus its embedding into the host.
#[pyclass(frozen, name = "Witness")]
struct PyWitness {
    /// `vertices[i]` is the host id of subgraph vertex `i`.
    #[pyo3(get)]
    vertices: Vec<u32>,
    /// Edges in subgraph-local ids.
    #[pyo3(get)]
    edges: Vec<(u32, u32)>,
    #[pyo3(get)]
    stages: Vec<String>,
    /// Exact degree when the route certifies regularity.
    #[pyo3(get)]
    regular_degree: Option<usize>,
    /// Max over min degree for almost-regular outputs.
    #[pyo3(get)]
    degree_ratio: Option<f64>,
}

#[pymethods]
impl PyWitness {
    fn __repr__(&self) -> String {
        format!(
            "Witness(vertices={}, edges={}, regular_degree={:?})",
            self.vertices.len(),
            self.edges.len(),
            self.regular_degree
        )
    }
}

fn witness_of(w: &SubgraphWitness, stages: Vec<String>, r: Option<usize>, ratio: Option<f64>) -> PyWitness {
    PyWitness {
        vertices: w.vertices.clone(),
        edges: w.graph.edges().to_vec(),
        stages,
        regular_degree: r,
        degree_ratio: ratio,
    }
}

/// Extracts a subgraph from `g`. Methods: "es" (full pipeline), "logn"
/// (regularize-first), "hyper" (sunflower-free route) all need `r` and
/// certify an r-regular result; "almostreg" ignores `r` and certifies a
/// 4-almost-regular result. Results are certified against the host before
/// they are returned.
#[pyfunction]
#[pyo3(signature = (g, r = None, method = "es", seed = 0))]
fn extract(g: &PyGraph, r: Option<usize>, method: &str, seed: u64) -> PyResult<PyWitness> {
    let cfg = ConstantsConfig::default();
    let host = &g.inner;
    match method {
        "es" | "logn" | "hyper" => {
            let r = r.ok_or_else(|| PyValueError::new_err(format!("method {method:?} needs r")))?;
            let mut rng = stage_rng(seed, &format!("run:{method}"));
            let (witness, stages) = match method {
                "es" => {
                    let out = erdos_sauer(host, r, &cfg, &mut rng).map_err(to_py)?;
                    (out.witness, out.stages)
                }
                "hyper" => {
                    let out = hyper_route(host, r, &cfg, &mut rng).map_err(to_py)?;
                    (out.witness, out.stages)
                }
                _ => {
                    let w = regular_by_regularization(host, r, &cfg, &mut rng).map_err(to_py)?;
                    let stage = format!("regularize-first extraction at r={r}");
                    (w, vec![stage])
                }
            };
            check_regular_witness(host, &witness, r).map_err(to_py)?;
            Ok(witness_of(&witness, stages, Some(r), None))
        }
        "almostreg" => {
            let out = almost_regular_subgraph(host).map_err(to_py)?;
            if !out.witness.is_subgraph_of(host) {
                return Err(PyRuntimeError::new_err("output left the host"));
            }
            let ds = degree_summary(&out.witness.graph).map_err(to_py)?;
            if ds.min_deg == 0 || ds.max_deg > 4 * ds.min_deg {
                return Err(PyRuntimeError::new_err(format!(
                    "degree window violated: min {} max {}",
                    ds.min_deg, ds.max_deg
                )));
            }
            let ratio = ds.max_deg as f64 / ds.min_deg as f64;
            let stages = vec![format!(
                "halving chain depth {} landed in window [{}, {})",
                out.chain_depth,
                out.window_start,
                out.window_start + out.window_len
            )];
            Ok(witness_of(&out.witness, stages, None, Some(ratio)))
        }
        other => Err(PyValueError::new_err(format!(
            "unknown method {other:?}; expected es, logn, almostreg, or hyper"
        ))),
    }
}

/// Re-certifies a witness against a host: subgraph embedding plus exact
/// r-regularity. Returns True or raises ValueError with the defect.
#[pyfunction]
fn verify(g: &PyGraph, w: &PyWitness, r: usize) -> PyResult<bool> {
    let sub = regulus::Graph::new(w.vertices.len(), w.edges.iter().copied()).map_err(to_py)?;
    let witness = SubgraphWitness::new(sub, w.vertices.clone()).map_err(to_py)?;
    check_regular_witness(&g.inner, &witness, r).map_err(to_py)?;
    Ok(true)
}

/// Exact existence: True / False, or None when the node budget ran out.
#[pyfunction]
#[pyo3(signature = (g, r, budget = 1_000_000))]
fn exists_regular(g: &PyGraph, r: usize, budget: u64) -> PyResult<Option<bool>> {
    let b = SearchBudget { node_limit: budget, ..SearchBudget::default() };
    match find_regular_subgraph_exact(&g.inner, r, &b).map_err(to_py)? {
        SearchVerdict::Found(_) => Ok(Some(true)),
        SearchVerdict::Absent => Ok(Some(false)),
        SearchVerdict::Indeterminate => Ok(None),
    }
}

/// Largest r with an r-regular subgraph, or None if the budget ran out.
#[pyfunction]
#[pyo3(signature = (g, budget = 1_000_000))]
fn max_regular_degree(g: &PyGraph, budget: u64) -> PyResult<Option<usize>> {
    let b = SearchBudget { node_limit: budget, ..SearchBudget::default() };
    match lib_max_regular(&g.inner, &b).map_err(to_py)? {
        DegreeVerdict::Exact(d) => Ok(Some(d)),
        DegreeVerdict::Indeterminate => Ok(None),
    }
}

/// Builds a synthetic host. `kind` is "small_r" or "large_r"; returns the
/// graph and the generation report as a JSON string. Reruns with equal
/// arguments return identical graphs.
#[pyfunction]
#[pyo3(signature = (kind, n, r, seed = 0))]
fn generate(kind: &str, n: usize, r: usize, seed: u64) -> PyResult<(PyGraph, String)> {
    let kind = match kind {
        "small_r" => ConstructionKind::SmallR,
        "large_r" => ConstructionKind::LargeR,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown kind {other:?}; expected small_r or large_r"
            )))
        }
    };
    let spec = ConstructionSpec { kind, n, r, overrides: Default::default(), seed };
    let (graph, report) = match kind {
        ConstructionKind::SmallR => {
            let (h, rep) = gen_small_r(&spec).map_err(to_py)?;
            (h.to_graph(), rep)
        }
        ConstructionKind::LargeR => gen_large_r(&spec).map_err(to_py)?,
    };
    let report_json = serde_json::to_string(&report)
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok((PyGraph { inner: graph }, report_json))
}

#[pymodule]
fn regulus_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyWitness>()?;
    m.add_function(wrap_pyfunction!(extract, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(exists_regular, m)?)?;
    m.add_function(wrap_pyfunction!(max_regular_degree, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    Ok(())
}
