//! Python bindings: `import gca`.
//!
//! Densities come back as `fractions.Fraction`; covers and routes as plain
//! dicts with the same keys as the CLI's JSON.

use gca_core::cli::cover_json;
use gca_core::density::DensityValue;
use gca_core::io::{loaded_to_dot, write_edge_list, write_json, DotStyle};
use gca_core::{
    core_decomposition, dense_cover, densest_edge_density_subgraph, eval_measure, Error, GraphFormat, LoadedGraph, MeasureExpr, NodeId,
    WeightPolicy,
};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn measure(text: &str) -> PyResult<MeasureExpr> {
    let m: MeasureExpr = text.parse().map_err(err)?;
    m.validate().map_err(err)?;
    Ok(m)
}

fn density_arg(value: &Bound<'_, PyAny>) -> PyResult<DensityValue> {
    value.str()?.to_str()?.parse().map_err(err)
}

fn fraction<'py>(py: Python<'py>, d: DensityValue) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((d.numer(), d.denom()))
}

fn to_py<'py>(py: Python<'py>, value: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (value.to_string(),))
}

/// A network with a relative load on every link.
#[pyclass(name = "Graph", module = "gca", frozen)]
pub struct PyGraph {
    inner: LoadedGraph,
}

impl PyGraph {
    fn node(&self, label: &str) -> PyResult<NodeId> {
        self.inner.graph().require_node(label).map_err(err)
    }
}

#[pymethods]
impl PyGraph {
    /// Builds a graph from `(u, v, load)` triples plus optional isolated nodes.
    #[new]
    #[pyo3(signature = (edges, nodes = Vec::new()))]
    fn new(edges: Vec<(String, String, f64)>, nodes: Vec<String>) -> PyResult<Self> {
        Ok(PyGraph { inner: LoadedGraph::from_labeled(&nodes, &edges).map_err(err)? })
    }

    /// Parses an edge list (`"edges"`) or JSON (`"json"`) document.
    #[staticmethod]
    #[pyo3(signature = (text, format = "edges"))]
    fn parse(text: &str, format: &str) -> PyResult<Self> {
        let format: GraphFormat = format.parse().map_err(err)?;
        Ok(PyGraph { inner: gca_core::parse_graph(text, format).map_err(err)? })
    }

    #[getter]
    fn node_count(&self) -> usize {
        self.inner.graph().node_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.graph().edge_count()
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.inner.graph().labels().to_vec()
    }

    fn edges(&self) -> Vec<(String, String, f64)> {
        let g = self.inner.graph();
        g.edges().iter().zip(self.inner.loads()).map(|(&(u, v), &l)| (g.label(u).to_string(), g.label(v).to_string(), l)).collect()
    }

    fn to_edge_list(&self) -> String {
        write_edge_list(&self.inner)
    }

    fn to_json(&self) -> String {
        write_json(&self.inner)
    }

    #[pyo3(signature = (threshold = None))]
    fn to_dot(&self, threshold: Option<f64>) -> String {
        loaded_to_dot(&self.inner, &DotStyle { threshold, ..Default::default() })
    }

    fn __repr__(&self) -> String {
        format!("Graph(nodes={}, edges={})", self.node_count(), self.edge_count())
    }
}

/// Subgraph of links with load strictly above `threshold`.
#[pyfunction]
fn congested_core(g: &PyGraph, threshold: f64) -> PyResult<PyGraph> {
    let core = gca_core::congested_core(&g.inner, threshold).map_err(err)?;
    let loads = g.inner.loads_for(&core.core, &core.origin);
    Ok(PyGraph { inner: LoadedGraph::new(core.core, loads).map_err(err)? })
}

/// Core number of every node, keyed by label.
#[pyfunction]
fn core_numbers(g: &PyGraph) -> Vec<(String, usize)> {
    let graph = g.inner.graph();
    let cores = core_decomposition(graph);
    graph.nodes().map(|v| (graph.label(v).to_string(), cores.core_number(v))).collect()
}

#[pyfunction]
fn k_core(g: &PyGraph, k: usize) -> Vec<String> {
    let graph = g.inner.graph();
    gca_core::k_core(graph, k).iter().map(|v| graph.label(v).to_string()).collect()
}

#[pyfunction]
fn degeneracy(g: &PyGraph) -> PyResult<usize> {
    gca_core::degeneracy(g.inner.graph()).map_err(err)
}

/// Density of the whole graph under a measure expression such as `"min(edge,conn)"`.
#[pyfunction]
fn evaluate<'py>(py: Python<'py>, g: &PyGraph, measure_expr: &str) -> PyResult<Bound<'py, PyAny>> {
    let m = measure(measure_expr)?;
    fraction(py, eval_measure(&m, g.inner.graph()).map_err(err)?)
}

/// Node set and density of the largest densest subgraph.
#[pyfunction]
fn densest_subgraph<'py>(py: Python<'py>, g: &PyGraph) -> PyResult<(Vec<String>, Bound<'py, PyAny>)> {
    let graph = g.inner.graph();
    let best = densest_edge_density_subgraph(graph).map_err(err)?;
    let labels = best.nodes.iter().map(|v| graph.label(v).to_string()).collect();
    Ok((labels, fraction(py, best.density)?))
}

/// Union of all subgraphs with density at least `rho0`.
#[pyfunction]
fn cover<'py>(py: Python<'py>, g: &PyGraph, measure_expr: &str, rho0: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
    let m = measure(measure_expr)?;
    let c = dense_cover(g.inner.graph(), &m, density_arg(rho0)?).map_err(err)?;
    to_py(py, &cover_json(g.inner.graph(), &c))
}

/// Shortest path avoiding the dense cover of the congested core at `rho0`.
#[pyfunction]
#[pyo3(signature = (g, threshold, measure_expr, rho0, source, target, weights = "unit"))]
#[allow(clippy::too_many_arguments)]
fn route<'py>(
    py: Python<'py>,
    g: &PyGraph,
    threshold: f64,
    measure_expr: &str,
    rho0: &Bound<'py, PyAny>,
    source: &str,
    target: &str,
    weights: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let policy: WeightPolicy = weights.parse().map_err(err)?;
    let result = gca_core::route_with_density_index(
        &g.inner,
        threshold,
        &measure(measure_expr)?,
        density_arg(rho0)?,
        g.node(source)?,
        g.node(target)?,
        policy,
    )
    .map_err(err)?;
    to_py(py, &result.to_json(g.inner.graph()))
}

/// Shortest path avoiding every densest subgraph of the congested core.
#[pyfunction]
#[pyo3(signature = (g, threshold, measure_expr, source, target, weights = "unit"))]
fn cap_route<'py>(
    py: Python<'py>,
    g: &PyGraph,
    threshold: f64,
    measure_expr: &str,
    source: &str,
    target: &str,
    weights: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let policy: WeightPolicy = weights.parse().map_err(err)?;
    let result =
        gca_core::cap_route(&g.inner, threshold, &measure(measure_expr)?, g.node(source)?, g.node(target)?, policy).map_err(err)?;
    to_py(py, &result.to_json(g.inner.graph()))
}

/// Density index of a path given as node labels.
#[pyfunction]
fn density_index<'py>(py: Python<'py>, g: &PyGraph, threshold: f64, measure_expr: &str, path: Vec<String>) -> PyResult<Bound<'py, PyAny>> {
    let nodes = path.iter().map(|l| g.node(l)).collect::<PyResult<Vec<_>>>()?;
    let result = gca_core::density_index(&g.inner, threshold, &measure(measure_expr)?, &nodes).map_err(err)?;
    fraction(py, result.value)
}

#[pymodule]
fn gca(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_function(wrap_pyfunction!(congested_core, m)?)?;
    m.add_function(wrap_pyfunction!(core_numbers, m)?)?;
    m.add_function(wrap_pyfunction!(k_core, m)?)?;
    m.add_function(wrap_pyfunction!(degeneracy, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(densest_subgraph, m)?)?;
    m.add_function(wrap_pyfunction!(cover, m)?)?;
    m.add_function(wrap_pyfunction!(route, m)?)?;
    m.add_function(wrap_pyfunction!(cap_route, m)?)?;
    m.add_function(wrap_pyfunction!(density_index, m)?)?;
    Ok(())
}
