//! Python bindings: graphs, sequences, signals, switched systems and chain sets.

use pyo3::exceptions::{PyArithmeticError, PyMemoryError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use skewchain::chain::{build_chain_graph, cell_runs, chain_components};
use skewchain::symbolic::chaos_certificate;
use skewchain::{
    ChainMode, ChainParams, ChaosCertificate, DirectedGraph, Error, Grid, HybridState, StateBox, SwitchedSystem,
    SwitchingSignal, SymbolicSequence, VectorField,
};

fn err(e: Error) -> PyErr {
    match e {
        Error::Integration(_) => PyArithmeticError::new_err(e.to_string()),
        Error::ResourceGuard(_) => PyMemoryError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

trait IntoPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for skewchain::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(err)
    }
}

/// Directed graph with vertex labels.
#[pyclass(name = "Graph", module = "skewchain", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGraph {
    inner: DirectedGraph,
}

#[pymethods]
impl PyGraph {
    #[new]
    #[pyo3(signature = (vertices, edges, labels=None))]
    fn new(vertices: usize, edges: Vec<(usize, usize)>, labels: Option<Vec<String>>) -> PyResult<Self> {
        let mut g = DirectedGraph::new(vertices, &edges).py()?;
        if let Some(l) = labels {
            g = g.with_labels(l).py()?;
        }
        Ok(Self { inner: g })
    }

    #[staticmethod]
    fn complete(n: usize) -> PyResult<Self> {
        Ok(Self { inner: DirectedGraph::complete(n).py()? })
    }

    #[staticmethod]
    fn cycle(n: usize) -> PyResult<Self> {
        Ok(Self { inner: DirectedGraph::cycle(n).py()? })
    }

    /// JSON document or whitespace-separated edge list.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(Self { inner: DirectedGraph::parse(text).py()? })
    }

    #[getter]
    fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }

    #[getter]
    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().collect()
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.inner.labels().to_vec()
    }

    /// Vertices violating the degree condition as `(vertex, in, out)`.
    fn violations(&self) -> Vec<(usize, usize, usize)> {
        self.inner
            .validate()
            .violations
            .iter()
            .map(|v| (v.vertex, v.in_degree, v.out_degree))
            .collect()
    }

    fn is_valid(&self) -> bool {
        self.inner.validate().is_ok()
    }

    fn scc(&self) -> Vec<Vec<usize>> {
        self.inner.scc().components
    }

    fn condensation_edges(&self) -> Vec<(usize, usize)> {
        self.inner.scc().condensation_edges.into_iter().collect()
    }

    /// Strict pairs `(a, b)` of the Morse order on SCC indices.
    fn morse_pairs(&self) -> Vec<(usize, usize)> {
        self.inner.scc().morse_order().strict_pairs()
    }

    /// `("periodic_orbit", word)`, `("chaotic", [witness])` or `("transient", [])`.
    fn chaos_certificate(&self, component: Vec<usize>) -> PyResult<(String, Vec<usize>)> {
        Ok(match chaos_certificate(&self.inner, &component).py()? {
            ChaosCertificate::PeriodicOrbit { word } => ("periodic_orbit".into(), word),
            ChaosCertificate::Chaotic { witness } => ("chaotic".into(), vec![witness]),
            ChaosCertificate::Transient => ("transient".into(), vec![]),
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json().to_string()
    }

    fn __repr__(&self) -> String {
        format!("Graph(vertices={}, edges={})", self.inner.vertex_count(), self.inner.edge_count())
    }
}

/// Eventually periodic bi-infinite walk on a graph.
#[pyclass(name = "Sequence", module = "skewchain", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySequence {
    inner: SymbolicSequence,
    graph: DirectedGraph,
}

#[pymethods]
impl PySequence {
    /// Parses `left=(word) core=[word] right=(word) shift=k`.
    #[staticmethod]
    fn parse(graph: &PyGraph, text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: SymbolicSequence::parse(&graph.inner, text).py()?,
            graph: graph.inner.clone(),
        })
    }

    #[staticmethod]
    fn periodic(graph: &PyGraph, word: Vec<usize>) -> PyResult<Self> {
        Ok(Self {
            inner: SymbolicSequence::periodic(&graph.inner, &word).py()?,
            graph: graph.inner.clone(),
        })
    }

    fn at(&self, i: i64) -> usize {
        self.inner.at(i)
    }

    fn window(&self, lo: i64, hi: i64) -> Vec<usize> {
        self.inner.window(lo, hi)
    }

    fn shift(&self, k: i64) -> Self {
        Self {
            inner: self.inner.shift(k),
            graph: self.graph.clone(),
        }
    }

    #[pyo3(signature = (other, tol=1e-10))]
    fn distance(&self, other: &PySequence, tol: f64) -> PyResult<f64> {
        self.inner.distance(&other.inner, tol).py()
    }

    fn __eq__(&self, other: &PySequence) -> bool {
        self.inner.same_values(&other.inner)
    }

    fn __repr__(&self) -> String {
        format!("Sequence({})", self.inner.to_literal(&self.graph))
    }

    fn __str__(&self) -> String {
        self.inner.to_literal(&self.graph)
    }
}

/// Piecewise-constant switching signal with step `h` and offset `tau`.
#[pyclass(name = "Signal", module = "skewchain", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySignal {
    inner: SwitchingSignal,
    graph: DirectedGraph,
}

#[pymethods]
impl PySignal {
    /// Parses a sequence literal followed by `tau=<real>` and `h=<real>`;
    /// `h` may instead be given as an argument.
    #[staticmethod]
    #[pyo3(signature = (graph, text, h=None))]
    fn parse(graph: &PyGraph, text: &str, h: Option<f64>) -> PyResult<Self> {
        Ok(Self {
            inner: SwitchingSignal::parse_with_default_step(&graph.inner, text, h).py()?,
            graph: graph.inner.clone(),
        })
    }

    #[staticmethod]
    #[pyo3(signature = (sequence, h, offset=0.0))]
    fn embed(sequence: &PySequence, h: f64, offset: f64) -> PyResult<Self> {
        Ok(Self {
            inner: SwitchingSignal::new(sequence.inner.clone(), offset, h).py()?,
            graph: sequence.graph.clone(),
        })
    }

    #[getter]
    fn h(&self) -> f64 {
        self.inner.step()
    }

    #[getter]
    fn offset(&self) -> f64 {
        self.inner.offset()
    }

    fn value_at(&self, t: f64) -> usize {
        self.inner.value_at(t)
    }

    fn shift(&self, t: f64) -> Self {
        Self {
            inner: self.inner.shift(t),
            graph: self.graph.clone(),
        }
    }

    #[pyo3(signature = (other, tol=1e-10))]
    fn distance(&self, other: &PySignal, tol: f64) -> PyResult<f64> {
        self.inner.distance(&other.inner, tol).py()
    }

    fn __repr__(&self) -> String {
        format!("Signal({})", self.inner.to_literal(&self.graph))
    }

    fn __str__(&self) -> String {
        self.inner.to_literal(&self.graph)
    }
}

/// One vector field per vertex on a box, switched by a signal.
#[pyclass(name = "System", module = "skewchain", frozen)]
struct PySystem {
    inner: SwitchedSystem,
    graph: DirectedGraph,
}

#[pymethods]
impl PySystem {
    /// `fields[v]` lists one expression in `x1..xd` per component (or `x`
    /// when d = 1).
    #[new]
    #[pyo3(signature = (graph, bounds, h, fields, substeps=10, clamp=false))]
    fn new(
        graph: &PyGraph,
        bounds: Vec<(f64, f64)>,
        h: f64,
        fields: Vec<Vec<String>>,
        substeps: usize,
        clamp: bool,
    ) -> PyResult<Self> {
        let fields = fields
            .iter()
            .map(|f| VectorField::expressions(f))
            .collect::<skewchain::Result<Vec<_>>>()
            .py()?;
        let inner = SwitchedSystem::new(&graph.inner, StateBox::new(&bounds).py()?, h, substeps, fields)
            .py()?
            .with_clamp(clamp);
        Ok(Self {
            inner,
            graph: graph.inner.clone(),
        })
    }

    #[getter]
    fn h(&self) -> f64 {
        self.inner.step()
    }

    #[getter]
    fn dimension(&self) -> usize {
        self.inner.dimension()
    }

    /// State at time `t` (negative runs backward) from `x0` under `signal`.
    fn flow(&self, py: Python<'_>, t: f64, x0: Vec<f64>, signal: &PySignal) -> PyResult<Vec<f64>> {
        py.detach(|| self.inner.switched_flow(t, &x0, &signal.inner)).py()
    }

    /// Skew-product flow: returns the new state and the shifted signal.
    fn skew_product(&self, py: Python<'_>, t: f64, x0: Vec<f64>, signal: &PySignal) -> PyResult<(Vec<f64>, PySignal)> {
        let s = HybridState::new(x0, signal.inner.clone());
        let out = py.detach(|| self.inner.skew_product(t, &s)).py()?;
        Ok((
            out.x,
            PySignal {
                inner: out.f,
                graph: signal.graph.clone(),
            },
        ))
    }

    /// Samples `(t, x, active_vertex)` on `[0, t_end]`.
    fn trajectory(
        &self,
        py: Python<'_>,
        x0: Vec<f64>,
        signal: &PySignal,
        t_end: f64,
        sample_dt: f64,
    ) -> PyResult<Vec<(f64, Vec<f64>, usize)>> {
        let samples = py
            .detach(|| self.inner.trajectory(&x0, &signal.inner, t_end, sample_dt))
            .py()?;
        Ok(samples.into_iter().map(|s| (s.t, s.x, s.vertex)).collect())
    }

    /// Chain-recurrent components on a uniform grid. Each entry is a dict with
    /// `id`, `viable`, `cells`, `runs` and `centers`.
    #[pyo3(signature = (grid, eps, m=1, mode="free", q=1))]
    fn chain_sets<'py>(
        &self,
        py: Python<'py>,
        grid: Vec<usize>,
        eps: f64,
        m: usize,
        mode: &str,
        q: usize,
    ) -> PyResult<Vec<Bound<'py, PyDict>>> {
        let mode: ChainMode = mode.parse().py()?;
        let grid = Grid::new(self.inner.bounds().clone(), &grid).py()?;
        let params = ChainParams::new(eps, m, mode).with_offsets(q);
        let comps = py
            .detach(|| build_chain_graph(&self.inner, &self.graph, &grid, &params).map(|cg| chain_components(&cg)))
            .py()?;
        comps
            .into_iter()
            .map(|c| {
                let d = PyDict::new(py);
                d.set_item("id", c.id)?;
                d.set_item("viable", c.viable)?;
                d.set_item("runs", cell_runs(&c.cells))?;
                d.set_item("centers", grid.centers(&c.cells))?;
                d.set_item("cells", c.cells)?;
                Ok(d)
            })
            .collect()
    }
}

/// Euclidean distance of the states plus the signal distance.
#[pyfunction]
#[pyo3(signature = (xa, fa, xb, fb, tol=1e-10))]
fn product_metric(xa: Vec<f64>, fa: &PySignal, xb: Vec<f64>, fb: &PySignal, tol: f64) -> PyResult<f64> {
    skewchain::product_metric(
        &HybridState::new(xa, fa.inner.clone()),
        &HybridState::new(xb, fb.inner.clone()),
        tol,
    )
    .py()
}

#[pymodule]
#[pyo3(name = "skewchain")]
fn skewchain_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PySequence>()?;
    m.add_class::<PySignal>()?;
    m.add_class::<PySystem>()?;
    m.add_function(wrap_pyfunction!(product_metric, m)?)?;
    Ok(())
}
