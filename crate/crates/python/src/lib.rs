//! Python bindings. Rationals cross the boundary as `fractions.Fraction` on the way out
//! and as anything whose `str()` parses as `p/q` (int, str, Fraction) on the way in.

use std::collections::BTreeMap;

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use pottsforge::exact_eval::{frontier, ExactOracle};
use pottsforge::gadget::{dp_weights, phase_constants, tune_rho_with, TunerConfig};
use pottsforge::model::number::parse_rational;
use pottsforge::model::text::{self, Instance as CoreInstance};
use pottsforge::random_cluster::{Conditioning, EdgeProbabilityMap, HeatBath, Model};
use pottsforge::reductions::{run_pipeline, PipelineConfig};
use pottsforge::{BigRational, BipartiteGraph, Error, Seed, WeightedGraph, WeightedHypergraph};

create_exception!(pottsforge, PottsforgeError, PyException, "Any failure reported by the core library.");
create_exception!(
    pottsforge,
    RegimeError,
    PottsforgeError,
    "An exact oracle hit its cap, the tuner found no crossing, or a gadget is too large."
);

fn to_py(e: Error) -> PyErr {
    if e.is_regime_error() {
        RegimeError::new_err(e.to_string())
    } else {
        PottsforgeError::new_err(e.to_string())
    }
}

fn rational(x: &Bound<'_, PyAny>) -> PyResult<BigRational> {
    let s = x.str()?.to_string();
    parse_rational(s.trim()).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn fraction<'py>(py: Python<'py>, x: &BigRational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?
        .getattr("Fraction")?
        .call1((x.numer().clone(), x.denom().clone()))
}

/// A parsed graph, hypergraph or bipartite graph.
#[pyclass(module = "pottsforge", frozen, skip_from_py_object)]
#[derive(Clone)]
struct Instance {
    inner: CoreInstance,
}

#[pymethods]
impl Instance {
    /// Parses the line-oriented text format.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        text::parse(text).map(|inner| Self { inner }).map_err(to_py)
    }

    /// Graph on `n` vertices from `(u, v, weight)` triples.
    #[staticmethod]
    fn graph(n: usize, edges: Vec<(usize, usize, Bound<'_, PyAny>)>) -> PyResult<Self> {
        let mut g = WeightedGraph::new(n);
        for (u, v, w) in edges {
            g.add_edge(u, v, rational(&w)?).map_err(to_py)?;
        }
        Ok(Self {
            inner: CoreInstance::Graph(g),
        })
    }

    /// Hypergraph on `n` vertices from `(vertices, weight)` pairs.
    #[staticmethod]
    fn hypergraph(n: usize, hyperedges: Vec<(Vec<usize>, Bound<'_, PyAny>)>) -> PyResult<Self> {
        let mut h = WeightedHypergraph::new(n);
        for (f, w) in hyperedges {
            h.add_hyperedge(f, rational(&w)?).map_err(to_py)?;
        }
        Ok(Self {
            inner: CoreInstance::Hypergraph(h),
        })
    }

    #[staticmethod]
    fn bipartite(left: usize, right: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        let b = BipartiteGraph::new(left, right, edges).map_err(to_py)?;
        Ok(Self {
            inner: CoreInstance::Bipartite(b),
        })
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind()
    }

    #[getter]
    fn n(&self) -> usize {
        match &self.inner {
            CoreInstance::Graph(g) => g.n(),
            CoreInstance::Hypergraph(h) => h.n(),
            CoreInstance::Bipartite(b) => b.n(),
        }
    }

    #[getter]
    fn m(&self) -> usize {
        match &self.inner {
            CoreInstance::Graph(g) => g.m(),
            CoreInstance::Hypergraph(h) => h.m(),
            CoreInstance::Bipartite(b) => b.edges().len(),
        }
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn __repr__(&self) -> String {
        format!("Instance(kind={:?}, n={}, m={})", self.kind(), self.n(), self.m())
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }
}

fn as_graph(inst: &Instance) -> PyResult<&WeightedGraph> {
    match &inst.inner {
        CoreInstance::Graph(g) => Ok(g),
        other => Err(PyValueError::new_err(format!("expected a graph, got a {}", other.kind()))),
    }
}

/// `Z_Tutte(G; q, γ)`. Graphs use the frontier evaluator unless `brute` is set;
/// hypergraphs always enumerate subsets (subject to the cap).
#[pyfunction]
#[pyo3(signature = (instance, q, brute = false))]
fn tutte<'py>(
    py: Python<'py>,
    instance: &Instance,
    q: &Bound<'py, PyAny>,
    brute: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let q = rational(q)?;
    let oracle = ExactOracle::default();
    let v = match &instance.inner {
        CoreInstance::Graph(g) if !brute => frontier::tutte(g, &q),
        CoreInstance::Graph(g) => oracle.tutte_graph(g, &q).map(|v| v.value),
        CoreInstance::Hypergraph(h) => oracle.tutte_hypergraph(h, &q).map(|v| v.value),
        CoreInstance::Bipartite(_) => return Err(PyValueError::new_err("bipartite instances have no Tutte value")),
    }
    .map_err(to_py)?;
    fraction(py, &v)
}

/// `Z_Potts(H; q, γ)` by summing over all `q^n` colourings; `q` must be a positive integer.
#[pyfunction]
fn potts<'py>(py: Python<'py>, instance: &Instance, q: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
    let q = rational(q)?;
    let h = match &instance.inner {
        CoreInstance::Graph(g) => g.to_hypergraph(),
        CoreInstance::Hypergraph(h) => h.clone(),
        CoreInstance::Bipartite(_) => return Err(PyValueError::new_err("bipartite instances have no Potts value")),
    };
    let v = ExactOracle::default().potts(&h, &q).map_err(to_py)?;
    fraction(py, &v.value)
}

/// Independence polynomial `Σ_I μ^{|I ∩ U|}` of a bipartite instance.
#[pyfunction]
fn independence_polynomial<'py>(
    py: Python<'py>,
    instance: &Instance,
    mu: &Bound<'py, PyAny>,
) -> PyResult<Bound<'py, PyAny>> {
    let CoreInstance::Bipartite(b) = &instance.inner else {
        return Err(PyValueError::new_err("expected a bipartite instance"));
    };
    let z = b.independence_polynomial(&rational(mu)?).map_err(to_py)?;
    fraction(py, &z)
}

/// Heat-bath chain; returns a dict with the final edge subset and component sizes.
/// Edge probabilities are `p` if given, else `γ/(1+γ)` from the graph's weights.
#[pyfunction]
#[pyo3(signature = (graph, q = None, *, sweeps = 100, seed = 0, p = None, force_in = vec![], force_out = vec![]))]
#[allow(clippy::too_many_arguments)]
fn sample<'py>(
    py: Python<'py>,
    graph: &Instance,
    q: Option<&Bound<'py, PyAny>>,
    sweeps: u64,
    seed: u64,
    p: Option<&Bound<'py, PyAny>>,
    force_in: Vec<usize>,
    force_out: Vec<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let g = as_graph(graph)?;
    let model = match q {
        Some(q) => Model::RandomCluster { q: rational(q)? },
        None => Model::ErdosRenyi,
    };
    let probs = match p {
        Some(p) => EdgeProbabilityMap::uniform(g, &rational(p)?).map_err(to_py)?,
        None => EdgeProbabilityMap::from_weights(g),
    };
    let cond = Conditioning::new(force_in, force_out).map_err(to_py)?;
    let hb = HeatBath::new(g, &model, &probs, &cond).map_err(to_py)?;
    let summary = py.detach(|| {
        let mut rng = Seed(seed).rng();
        let mut state = hb.initial_state();
        for _ in 0..sweeps {
            hb.sweep(&mut state, &mut rng);
        }
        state.summary()
    });
    let d = PyDict::new(py);
    d.set_item("edges", summary.edges)?;
    d.set_item("edge_count", summary.edge_count)?;
    d.set_item("components", summary.components)?;
    d.set_item("component_sizes", summary.component_sizes)?;
    d.set_item("steps", summary.step)?;
    Ok(d)
}

/// Clique probability balancing the gadget with `N` clique and `t` terminal vertices.
/// Raises `RegimeError` when no grid point lands in the band around `gamma`.
#[pyfunction]
#[pyo3(signature = (n, t, q, gamma, chi, n_limit = 32))]
fn tune_rho<'py>(
    py: Python<'py>,
    n: usize,
    t: usize,
    q: &Bound<'py, PyAny>,
    gamma: &Bound<'py, PyAny>,
    chi: &Bound<'py, PyAny>,
    n_limit: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let (q, gamma, chi) = (rational(q)?, rational(gamma)?, rational(chi)?);
    let cfg = TunerConfig {
        n_limit,
        ..TunerConfig::default()
    };
    let res = py
        .detach(|| tune_rho_with(n, t, &q, &gamma, &chi, &cfg))
        .map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("rho", fraction(py, &res.rho)?)?;
    d.set_item("zeta", fraction(py, &res.zeta)?)?;
    d.set_item("grid_index", res.mu)?;
    d.set_item("grid_len", res.grid_len)?;
    d.set_item("asymptotic_regime", res.asymptotic_regime)?;
    Ok(d)
}

/// `{(t', N', k, l): weight}` from the gadget recurrence.
#[pyfunction]
fn gadget_weights<'py>(
    py: Python<'py>,
    t: usize,
    n: usize,
    gamma_clique: &Bound<'py, PyAny>,
    gamma_terminal: &Bound<'py, PyAny>,
) -> PyResult<Bound<'py, PyDict>> {
    let table = dp_weights(t, n, &rational(gamma_clique)?, &rational(gamma_terminal)?).map_err(to_py)?;
    let d = PyDict::new(py);
    for (key, w) in table.entries() {
        d.set_item(*key, fraction(py, w)?)?;
    }
    Ok(d)
}

/// Critical point `λ_c`, the second transition point and `θ = (q−2)/(q−1)` as floats.
#[pyfunction]
fn phase<'py>(py: Python<'py>, q: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyDict>> {
    let c = phase_constants(&rational(q)?, 64).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("lambda_c", c.lambda_c.to_f64())?;
    d.set_item("lambda", c.lambda.to_f64())?;
    d.set_item("theta", fraction(py, &c.theta)?)?;
    Ok(d)
}

/// Reduction of a bipartite instance to a uniform-weight Tutte instance at `(q, gamma)`.
/// Returns `(stages, final_graph, total_scale)`; each stage is a dict with its name,
/// instance, scale factor and warnings.
#[pyfunction]
#[pyo3(signature = (instance, q, gamma, eps, force_n = None))]
fn reduce<'py>(
    py: Python<'py>,
    instance: &Instance,
    q: &Bound<'py, PyAny>,
    gamma: &Bound<'py, PyAny>,
    eps: &Bound<'py, PyAny>,
    force_n: Option<usize>,
) -> PyResult<(Vec<Bound<'py, PyDict>>, Instance, Bound<'py, PyAny>)> {
    let CoreInstance::Bipartite(b) = &instance.inner else {
        return Err(PyValueError::new_err("expected a bipartite instance"));
    };
    let (q, gamma, eps) = (rational(q)?, rational(gamma)?, rational(eps)?);
    let cfg = PipelineConfig {
        clique_override: force_n,
        ..PipelineConfig::default()
    };
    let res = py.detach(|| run_pipeline(b, &q, &gamma, &eps, &cfg)).map_err(to_py)?;
    let mut stages = Vec::new();
    for t in &res.traces {
        let d = PyDict::new(py);
        d.set_item("stage", t.stage)?;
        d.set_item("instance", Instance { inner: t.instance.clone() })?;
        d.set_item("scale", fraction(py, &t.scale_factor)?)?;
        d.set_item("eps_used", fraction(py, &t.eps_used)?)?;
        d.set_item("warnings", t.warnings.clone())?;
        d.set_item("params", t.params.iter().collect::<BTreeMap<_, _>>())?;
        stages.push(d);
    }
    let total = fraction(py, &res.total_scale())?;
    let final_graph = Instance {
        inner: CoreInstance::Graph(res.final_graph),
    };
    Ok((stages, final_graph, total))
}

#[pymodule(name = "pottsforge")]
fn pottsforge_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Instance>()?;
    m.add("PottsforgeError", m.py().get_type::<PottsforgeError>())?;
    m.add("RegimeError", m.py().get_type::<RegimeError>())?;
    m.add_function(wrap_pyfunction!(tutte, m)?)?;
    m.add_function(wrap_pyfunction!(potts, m)?)?;
    m.add_function(wrap_pyfunction!(independence_polynomial, m)?)?;
    m.add_function(wrap_pyfunction!(sample, m)?)?;
    m.add_function(wrap_pyfunction!(tune_rho, m)?)?;
    m.add_function(wrap_pyfunction!(gadget_weights, m)?)?;
    m.add_function(wrap_pyfunction!(phase, m)?)?;
    m.add_function(wrap_pyfunction!(reduce, m)?)?;
    Ok(())
}
