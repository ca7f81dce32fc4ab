//! Python module `extremal`: exact formulas, families, oracles and smoothing.

use std::time::Duration;

use num_bigint::BigUint;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use extremal_core::families::{self, KSet};
use extremal_core::formulas;
use extremal_core::oracle::{self, Budget, OracleResult, SearchMode};
use extremal_core::smoothing::{self, BetaVector, SmoothingConfig};
use extremal_core::{Error, IntersectParams, MatchingParams};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Domain(_) | Error::Parse(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn matching(ell: usize, n: usize, k: usize) -> PyResult<MatchingParams> {
    MatchingParams::new(ell, n, k).map_err(py_err)
}

fn intersect(s: usize, n: usize, k: usize, t: usize) -> PyResult<IntersectParams> {
    IntersectParams::new(s, n, k, t).map_err(py_err)
}

fn sets_to_lists(sets: &[KSet]) -> Vec<Vec<usize>> {
    sets.iter().map(|x| x.to_vec()).collect()
}

fn beta(values: Vec<f64>) -> PyResult<BetaVector> {
    BetaVector::new(values).map_err(py_err)
}

/// Family of k-subsets of `[n]`; members are 1-based element lists.
#[pyclass(name = "SetFamily", module = "extremal", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySetFamily(families::SetFamily);

#[pymethods]
impl PySetFamily {
    #[new]
    fn new(n: usize, k: usize, members: Vec<Vec<usize>>) -> PyResult<Self> {
        let sets = members
            .iter()
            .map(|m| KSet::from_elements(m))
            .collect::<extremal_core::Result<Vec<_>>>()
            .map_err(py_err)?;
        Ok(PySetFamily(families::SetFamily::new(n, k, sets).map_err(py_err)?))
    }

    /// Parses the line format (`n=<n> k=<k>` header, one member per line).
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(PySetFamily(text.parse().map_err(py_err)?))
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn k(&self) -> usize {
        self.0.k()
    }

    fn members(&self) -> Vec<Vec<usize>> {
        sets_to_lists(self.0.members())
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("SetFamily(n={}, k={}, size={})", self.0.n(), self.0.k(), self.0.len())
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }

    /// `ell` pairwise-disjoint members, if present.
    fn find_matching(&self, ell: usize) -> Option<Vec<Vec<usize>>> {
        families::has_l_matching(&self.0, ell).map(|m| sets_to_lists(&m))
    }

    /// A tuple of at most `s` members sharing fewer than `t` elements, if present.
    fn swise_violation(&self, s: usize, t: usize) -> PyResult<Option<Vec<Vec<usize>>>> {
        Ok(families::is_swise_t_intersecting(&self.0, s, t)
            .map_err(py_err)?
            .map(|v| sets_to_lists(&v)))
    }

    fn is_left_compressed(&self) -> bool {
        families::is_left_compressed(&self.0)
    }

    fn left_compress(&self) -> Self {
        PySetFamily(families::left_compress(&self.0))
    }
}

#[pyfunction]
fn binom(a: i64, b: i64) -> BigUint {
    extremal_core::binom(a, b).into_biguint()
}

/// `(value, argmax_i)` of the matching formula.
#[pyfunction]
fn matching_formula_value(ell: usize, n: usize, k: usize) -> PyResult<(BigUint, usize)> {
    let (v, i) = formulas::matching_formula_value(&matching(ell, n, k)?).map_err(py_err)?;
    Ok((v.into_biguint(), i))
}

#[pyfunction]
fn erdos_value(ell: usize, n: usize, k: usize) -> PyResult<BigUint> {
    Ok(formulas::erdos_value(&matching(ell, n, k)?).into_biguint())
}

/// `(value, argmax_r)`; `argmax_r` is −1 when every k-set qualifies.
#[pyfunction]
fn intersect_value(s: usize, n: usize, k: usize, t: usize) -> PyResult<(BigUint, i64)> {
    let (v, r) = formulas::intersect_value(&intersect(s, n, k, t)?);
    Ok((v.into_biguint(), r))
}

#[pyfunction]
fn build_matching_extremal(ell: usize, n: usize, k: usize, i: usize) -> PyResult<PySetFamily> {
    Ok(PySetFamily(families::build_matching_extremal(&matching(ell, n, k)?, i).map_err(py_err)?))
}

#[pyfunction]
fn build_intersect_extremal(s: usize, n: usize, k: usize, t: usize, r: usize) -> PyResult<PySetFamily> {
    Ok(PySetFamily(families::build_intersect_extremal(&intersect(s, n, k, t)?, r).map_err(py_err)?))
}

fn budget(max_nodes: u64, max_seconds: f64) -> PyResult<Budget> {
    Ok(Budget {
        max_nodes,
        max_time: Duration::try_from_secs_f64(max_seconds)
            .map_err(|_| PyValueError::new_err("max_seconds must be a nonnegative finite number"))?,
    })
}

fn mode(compressed: bool) -> SearchMode {
    if compressed {
        SearchMode::Compressed
    } else {
        SearchMode::Exhaustive
    }
}

fn oracle_dict(py: Python<'_>, r: OracleResult) -> PyResult<Bound<'_, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("max_size", r.max_size)?;
    d.set_item("optimal", r.optimal)?;
    d.set_item("nodes_explored", r.nodes_explored)?;
    d.set_item("witness", PySetFamily(r.witness))?;
    Ok(d)
}

/// Exact maximum family without `ell` pairwise-disjoint members.
#[pyfunction]
#[pyo3(signature = (n, k, ell, max_nodes = 100_000_000, max_seconds = 300.0, compressed = false))]
fn max_no_matching(
    py: Python<'_>,
    n: usize,
    k: usize,
    ell: usize,
    max_nodes: u64,
    max_seconds: f64,
    compressed: bool,
) -> PyResult<Bound<'_, PyDict>> {
    let b = budget(max_nodes, max_seconds)?;
    let r = py
        .detach(|| oracle::max_no_matching_with(n, k, ell, b, mode(compressed)))
        .map_err(py_err)?;
    oracle_dict(py, r)
}

/// Exact maximum s-wise t-intersecting family.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
#[pyo3(signature = (n, k, s, t, max_nodes = 100_000_000, max_seconds = 300.0, compressed = false))]
fn max_swise_t_intersecting(
    py: Python<'_>,
    n: usize,
    k: usize,
    s: usize,
    t: usize,
    max_nodes: u64,
    max_seconds: f64,
    compressed: bool,
) -> PyResult<Bound<'_, PyDict>> {
    let b = budget(max_nodes, max_seconds)?;
    let r = py
        .detach(|| oracle::max_swise_t_intersecting_with(n, k, s, t, b, mode(compressed)))
        .map_err(py_err)?;
    oracle_dict(py, r)
}

#[pyfunction]
fn gaussian_cdf(x: f64) -> f64 {
    smoothing::gaussian_cdf(x)
}

#[pyfunction]
fn project_monotone_simplex(y: Vec<f64>) -> Vec<f64> {
    smoothing::project_monotone_simplex(&y)
}

#[pyfunction]
fn smoothed_count(beta_values: Vec<f64>, delta: f64, sigma: f64, n: usize, k: usize) -> PyResult<f64> {
    smoothing::smoothed_count(&beta(beta_values)?, delta, sigma, n, k).map_err(py_err)
}

/// Gradient with `β_a` eliminated, one entry per `j ∈ [a−1]`.
#[pyfunction]
fn grad_smoothed_count(
    beta_values: Vec<f64>,
    delta: f64,
    sigma: f64,
    n: usize,
    k: usize,
    a: usize,
) -> PyResult<Vec<f64>> {
    smoothing::grad_smoothed_count(&beta(beta_values)?, delta, sigma, n, k, a).map_err(py_err)
}

#[pyfunction]
fn admissible_count(a: usize, m: usize, n: usize, k: usize) -> PyResult<BigUint> {
    Ok(smoothing::admissible_count(a, m, n, k).map_err(py_err)?.into_biguint())
}

fn smooth(py: Python<'_>, problem: smoothing::Problem, config: SmoothingConfig) -> PyResult<Bound<'_, PyDict>> {
    let out = py.detach(|| smoothing::maximize(problem, &config)).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("beta", out.beta.to_vec())?;
    d.set_item("delta", out.delta)?;
    d.set_item("smoothed_count", out.smoothed_count)?;
    d.set_item("family_size", out.family_size)?;
    d.set_item("witness_excluded", out.witness_excluded)?;
    d.set_item("nearest_step", out.nearest_step)?;
    d.set_item("converged", out.converged)?;
    d.set_item(
        "kkt_residual",
        out.kkt.as_ref().map(|r| r.stationarity_residual),
    )?;
    d.set_item("trace_y", out.trace.iter().map(|r| r.y).collect::<Vec<_>>())?;
    Ok(d)
}

/// Smoothed maximization for the matching problem.
#[pyfunction]
#[pyo3(signature = (ell, n, k, seed = 0, max_iter = 20_000, sigma = 1e-3, mu1 = 0.1, support = None))]
#[allow(clippy::too_many_arguments)]
fn smooth_matching(
    py: Python<'_>,
    ell: usize,
    n: usize,
    k: usize,
    seed: u64,
    max_iter: usize,
    sigma: f64,
    mu1: f64,
    support: Option<usize>,
) -> PyResult<Bound<'_, PyDict>> {
    let config = SmoothingConfig { seed, max_iter, sigma, mu1, support, ..Default::default() };
    smooth(py, smoothing::Problem::Matching(matching(ell, n, k)?), config)
}

/// Smoothed maximization for the s-wise t-intersecting problem.
#[pyfunction]
#[pyo3(signature = (s, n, k, t, seed = 0, max_iter = 20_000, sigma = 1e-3, mu2 = 0.1, support = None))]
#[allow(clippy::too_many_arguments)]
fn smooth_intersect(
    py: Python<'_>,
    s: usize,
    n: usize,
    k: usize,
    t: usize,
    seed: u64,
    max_iter: usize,
    sigma: f64,
    mu2: f64,
    support: Option<usize>,
) -> PyResult<Bound<'_, PyDict>> {
    let config = SmoothingConfig { seed, max_iter, sigma, mu2, support, ..Default::default() };
    smooth(py, smoothing::Problem::Intersect(intersect(s, n, k, t)?), config)
}

#[pymodule]
fn extremal(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySetFamily>()?;
    m.add_function(wrap_pyfunction!(binom, m)?)?;
    m.add_function(wrap_pyfunction!(matching_formula_value, m)?)?;
    m.add_function(wrap_pyfunction!(erdos_value, m)?)?;
    m.add_function(wrap_pyfunction!(intersect_value, m)?)?;
    m.add_function(wrap_pyfunction!(build_matching_extremal, m)?)?;
    m.add_function(wrap_pyfunction!(build_intersect_extremal, m)?)?;
    m.add_function(wrap_pyfunction!(max_no_matching, m)?)?;
    m.add_function(wrap_pyfunction!(max_swise_t_intersecting, m)?)?;
    m.add_function(wrap_pyfunction!(gaussian_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(project_monotone_simplex, m)?)?;
    m.add_function(wrap_pyfunction!(smoothed_count, m)?)?;
    m.add_function(wrap_pyfunction!(grad_smoothed_count, m)?)?;
    m.add_function(wrap_pyfunction!(admissible_count, m)?)?;
    m.add_function(wrap_pyfunction!(smooth_matching, m)?)?;
    m.add_function(wrap_pyfunction!(smooth_intersect, m)?)?;
    Ok(())
}
