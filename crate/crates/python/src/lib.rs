use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use rotdim::embedding::{extract_embedding_detailed, kkt_residuals, separator_shadow_check};
use rotdim::families::{self, Family};
use rotdim::graph::{clique_sum_family, complete_graph, complete_minus_edge};
use rotdim::optimizer::maximize_lambda1;
use rotdim::spectral::first_nonzero_eigenvalue;
use rotdim::{EdgeWeights, Embedding, Error, KktReport, MinorOp, SolverConfig};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::NoConvergence { .. }
        | Error::DegenerateSpectrum
        | Error::LpInfeasible
        | Error::DisconnectedSupport => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Connected simple graph with vertex weights and edge lengths. Vertices are 0-based.
#[pyclass(name = "Graph", module = "pyrotdim", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGraph {
    inner: rotdim::Graph,
}

#[pymethods]
impl PyGraph {
    #[new]
    #[pyo3(signature = (n, edges, s=None, lengths=None))]
    fn new(n: usize, edges: Vec<(usize, usize)>, s: Option<Vec<f64>>, lengths: Option<Vec<f64>>) -> PyResult<Self> {
        let s = s.unwrap_or_else(|| vec![1.0; n]);
        let lengths = lengths.unwrap_or_else(|| vec![1.0; edges.len()]);
        let inner = rotdim::Graph::new(n, &edges, s, lengths).map_err(to_py)?;
        Ok(PyGraph { inner })
    }

    #[staticmethod]
    fn complete(n: usize) -> PyResult<Self> {
        Ok(PyGraph { inner: complete_graph(n).map_err(to_py)? })
    }

    #[staticmethod]
    fn complete_minus_edge(n: usize) -> PyResult<Self> {
        Ok(PyGraph { inner: complete_minus_edge(n).map_err(to_py)? })
    }

    /// K_m plus k satellites, each joined to every clique vertex.
    #[staticmethod]
    fn clique_sum(m: usize, k: usize) -> PyResult<Self> {
        Ok(PyGraph { inner: clique_sum_family(m, k).map_err(to_py)? })
    }

    /// Parses the 1-based JSON graph format.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyGraph { inner: rotdim::io::graph_from_json(text).map_err(to_py)? })
    }

    fn to_json(&self) -> String {
        rotdim::io::graph_to_json(&self.inner)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().to_vec()
    }

    #[getter]
    fn s(&self) -> Vec<f64> {
        self.inner.s().to_vec()
    }

    #[getter]
    fn lengths(&self) -> Vec<f64> {
        self.inner.lengths().to_vec()
    }

    fn is_connected(&self) -> bool {
        self.inner.is_connected()
    }

    fn delete_edge(&self, a: usize, b: usize) -> PyResult<Self> {
        self.minor(MinorOp::DeleteEdge(a, b))
    }

    fn contract_edge(&self, a: usize, b: usize) -> PyResult<Self> {
        self.minor(MinorOp::ContractEdge(a, b))
    }

    fn delete_isolated_vertex(&self, v: usize) -> PyResult<Self> {
        self.minor(MinorOp::DeleteIsolatedVertex(v))
    }

    /// Components left after removing `vertices`; ValueError if none are split off.
    fn components_after_removal(&self, vertices: Vec<usize>) -> PyResult<Vec<Vec<usize>>> {
        Ok(self.inner.components_after_removal(&vertices).map_err(to_py)?.components)
    }

    fn __len__(&self) -> usize {
        self.inner.n()
    }

    fn __repr__(&self) -> String {
        format!("Graph(n={}, edges={})", self.inner.n(), self.inner.edge_count())
    }
}

impl PyGraph {
    fn minor(&self, op: MinorOp) -> PyResult<Self> {
        Ok(PyGraph { inner: self.inner.minor(op).map_err(to_py)? })
    }
}

#[pyclass(name = "SolveResult", module = "pyrotdim", frozen, get_all)]
struct PySolveResult {
    weights: Vec<f64>,
    lambda1: f64,
    iterations: usize,
    converged: bool,
    best_history: Vec<f64>,
}

#[pymethods]
impl PySolveResult {
    fn __repr__(&self) -> String {
        format!("SolveResult(lambda1={}, iterations={}, converged={})", self.lambda1, self.iterations, self.converged)
    }
}

#[pyclass(name = "Spectrum", module = "pyrotdim", frozen, get_all)]
struct PySpectrum {
    lambda1: f64,
    multiplicity: usize,
    eigenbasis: Vec<Vec<f64>>,
    cluster_values: Vec<f64>,
    eigenvalues: Vec<f64>,
}

#[pyclass(name = "Extraction", module = "pyrotdim", frozen, get_all)]
struct PyExtraction {
    coords: Vec<Vec<f64>>,
    dim: usize,
    objective: f64,
    beta: Vec<f64>,
    upper_bound: f64,
    exact: bool,
}

#[pyclass(name = "Kkt", module = "pyrotdim", frozen, get_all)]
struct PyKkt {
    slackness: f64,
    stationarity: f64,
    equilibrium: f64,
    distance_violation: f64,
    weight_feasibility: f64,
}

#[pymethods]
impl PyKkt {
    fn max(&self) -> f64 {
        self.report().max()
    }

    fn passes(&self, tol: f64) -> bool {
        self.report().passes(tol)
    }

    fn __repr__(&self) -> String {
        format!(
            "Kkt(slackness={:e}, stationarity={:e}, equilibrium={:e}, distance_violation={:e}, weight_feasibility={:e})",
            self.slackness, self.stationarity, self.equilibrium, self.distance_violation, self.weight_feasibility
        )
    }
}

impl PyKkt {
    fn report(&self) -> KktReport {
        KktReport {
            slackness: self.slackness,
            stationarity: self.stationarity,
            equilibrium: self.equilibrium,
            distance_violation: self.distance_violation,
            weight_feasibility: self.weight_feasibility,
        }
    }
}

impl From<KktReport> for PyKkt {
    fn from(r: KktReport) -> Self {
        PyKkt {
            slackness: r.slackness,
            stationarity: r.stationarity,
            equilibrium: r.equilibrium,
            distance_violation: r.distance_violation,
            weight_feasibility: r.weight_feasibility,
        }
    }
}

#[pyclass(name = "AnalyticSolution", module = "pyrotdim", frozen, get_all)]
struct PyAnalytic {
    graph: PyGraph,
    weights: Vec<f64>,
    lambda1: f64,
    coords: Vec<Vec<f64>>,
    claimed_dim: usize,
    rotdim_claim: Option<usize>,
}

#[pymethods]
impl PyAnalytic {
    fn kkt(&self) -> PyResult<PyKkt> {
        kkt(&self.graph, self.weights.clone(), self.coords.clone(), self.lambda1)
    }
}

#[pyclass(name = "Bounds", module = "pyrotdim", frozen, get_all)]
struct PyBounds {
    clique_number: usize,
    chordal: bool,
    treewidth: Option<usize>,
    lower: usize,
    upper: Option<usize>,
}

#[pyfunction]
#[pyo3(signature = (graph, max_iters=20_000, tol=1e-8, step_scale=None, seed=0))]
fn solve(graph: &PyGraph, max_iters: usize, tol: f64, step_scale: Option<f64>, seed: u64) -> PyResult<PySolveResult> {
    let cfg = SolverConfig { max_iters, tol, step_scale, seed, ..SolverConfig::default() };
    let r = maximize_lambda1(&graph.inner, &cfg).map_err(to_py)?;
    Ok(PySolveResult {
        weights: r.w_star.into_vec(),
        lambda1: r.lambda1,
        iterations: r.iterations,
        converged: r.converged,
        best_history: r.best_history,
    })
}

#[pyfunction]
#[pyo3(signature = (graph, weights, cluster_tol=rotdim::spectral::CLUSTER_TOL))]
fn spectrum(graph: &PyGraph, weights: Vec<f64>, cluster_tol: f64) -> PyResult<PySpectrum> {
    let w = EdgeWeights::new(weights).map_err(to_py)?;
    let r = first_nonzero_eigenvalue(&graph.inner, &w, cluster_tol).map_err(to_py)?;
    Ok(PySpectrum {
        lambda1: r.lambda1,
        multiplicity: r.multiplicity,
        eigenbasis: r.eigenbasis,
        cluster_values: r.cluster_values,
        eigenvalues: r.eigenvalues,
    })
}

/// Dual embedding at `weights`; the first eigenspace is every eigenvalue
/// within `cluster_tol` (relative) of the smallest nonzero one.
#[pyfunction]
#[pyo3(signature = (graph, weights, cluster_tol=1e-3))]
fn extract(graph: &PyGraph, weights: Vec<f64>, cluster_tol: f64) -> PyResult<PyExtraction> {
    let w = EdgeWeights::new(weights).map_err(to_py)?;
    let spec = first_nonzero_eigenvalue(&graph.inner, &w, cluster_tol).map_err(to_py)?;
    let ex = extract_embedding_detailed(&graph.inner, &w, &spec).map_err(to_py)?;
    Ok(PyExtraction {
        dim: ex.embedding.dim(),
        coords: ex.embedding.coords().to_vec(),
        objective: ex.objective,
        beta: ex.beta,
        upper_bound: ex.upper_bound,
        exact: ex.exact,
    })
}

#[pyfunction]
fn kkt(graph: &PyGraph, weights: Vec<f64>, coords: Vec<Vec<f64>>, lambda1: f64) -> PyResult<PyKkt> {
    let w = EdgeWeights::new(weights).map_err(to_py)?;
    let v = Embedding::new(coords).map_err(to_py)?;
    Ok(kkt_residuals(&graph.inner, &w, &v, lambda1).map_err(to_py)?.into())
}

/// Index of the first component whose segments to the origin meet the
/// separator's convex hull, or None.
#[pyfunction]
#[pyo3(signature = (graph, separator, coords, tol=1e-9))]
fn shadow_check(graph: &PyGraph, separator: Vec<usize>, coords: Vec<Vec<f64>>, tol: f64) -> PyResult<Option<usize>> {
    let sep = graph.inner.components_after_removal(&separator).map_err(to_py)?;
    let v = Embedding::new(coords).map_err(to_py)?;
    separator_shadow_check(&graph.inner, &sep, &v, tol).map_err(to_py)
}

/// Closed-form optimum of `complete`, `kn-minus-e`, `gmk` or `g23`.
#[pyfunction]
#[pyo3(signature = (name, n=None, m=None, k=None))]
fn family(name: &str, n: Option<usize>, m: Option<usize>, k: Option<usize>) -> PyResult<PyAnalytic> {
    let need = |v: Option<usize>, p: &str| v.ok_or_else(|| PyValueError::new_err(format!("family {name} needs {p}")));
    let fam = match name {
        "complete" => Family::Complete { n: need(n, "n")? },
        "kn-minus-e" => Family::KnMinusEdge { n: need(n, "n")? },
        "gmk" => Family::Gmk { m: need(m, "m")?, k: need(k, "k")? },
        "g23" => Family::G23,
        other => return Err(PyValueError::new_err(format!("unknown family {other:?}"))),
    };
    let sol = fam.analytic().map_err(to_py)?;
    Ok(PyAnalytic {
        weights: sol.w.as_slice().to_vec(),
        lambda1: sol.lambda1,
        coords: sol.embedding.coords().to_vec(),
        claimed_dim: sol.claimed_dim,
        rotdim_claim: sol.rotdim_claim,
        graph: PyGraph { inner: sol.graph },
    })
}

/// Family name and vertex permutation if `graph` is a recognized family member.
#[pyfunction]
fn identify_family(graph: &PyGraph) -> Option<(String, Vec<usize>)> {
    families::identify_family(&graph.inner).map(|(f, perm)| (f.name().to_string(), perm))
}

#[pyfunction]
fn clique_number(graph: &PyGraph) -> PyResult<usize> {
    families::clique_number(&graph.inner).map_err(to_py)
}

/// `(chordal, perfect elimination ordering)`.
#[pyfunction]
fn is_chordal(graph: &PyGraph) -> (bool, Option<Vec<usize>>) {
    families::is_chordal(&graph.inner)
}

#[pyfunction]
fn bounds(graph: &PyGraph) -> PyResult<PyBounds> {
    let b = families::invariant_bounds(&graph.inner).map_err(to_py)?;
    Ok(PyBounds {
        clique_number: b.clique_number,
        chordal: b.chordal,
        treewidth: b.treewidth,
        lower: b.lower,
        upper: b.upper,
    })
}

#[pymodule]
fn pyrotdim(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PySolveResult>()?;
    m.add_class::<PySpectrum>()?;
    m.add_class::<PyExtraction>()?;
    m.add_class::<PyKkt>()?;
    m.add_class::<PyAnalytic>()?;
    m.add_class::<PyBounds>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(extract, m)?)?;
    m.add_function(wrap_pyfunction!(kkt, m)?)?;
    m.add_function(wrap_pyfunction!(shadow_check, m)?)?;
    m.add_function(wrap_pyfunction!(family, m)?)?;
    m.add_function(wrap_pyfunction!(identify_family, m)?)?;
    m.add_function(wrap_pyfunction!(clique_number, m)?)?;
    m.add_function(wrap_pyfunction!(is_chordal, m)?)?;
    m.add_function(wrap_pyfunction!(bounds, m)?)?;
    Ok(())
}
