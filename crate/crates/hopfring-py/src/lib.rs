use pyo3::exceptions::{PyOverflowError, PyValueError};
use pyo3::prelude::*;

use ::hopfring::dyer_lashof::{adem_reduce_with, basis_r, DlString, Schedule};
use ::hopfring::error::Error;
use ::hopfring::fp::Prime;
use ::hopfring::hopf::HopfEngine;
use ::hopfring::invariants::{basis_b, basis_coinv_dual, basis_cokernel, basis_invariants, IndexString};
use ::hopfring::transfer::{e_product as product, q_coordinates, string_forward as forward};
use ::hopfring::verify::{run_named, Suite, VerifyConfig};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Overflow { .. } => PyOverflowError::new_err(e.to_string()),
        e => PyValueError::new_err(e.to_string()),
    }
}

fn prime(p: u32) -> PyResult<Prime> {
    Prime::new(p).map_err(py_err)
}

fn signed(c: u32, p: Prime) -> i64 {
    if c > p.get() / 2 {
        c as i64 - p.as_i64()
    } else {
        c as i64
    }
}

/// Admissible normal form of a word like "Q5 Q1", as (coefficient, term) pairs.
#[pyfunction]
#[pyo3(signature = (word, prime=3, drop_negative=false))]
fn adem_reduce(word: &str, prime: u32, drop_negative: bool) -> PyResult<Vec<(i64, String)>> {
    let p = self::prime(prime)?;
    let w = DlString::parse(word).map_err(py_err)?;
    let sched = if drop_negative { Schedule::LeftmostEager } else { Schedule::LeftmostKeepExcess };
    Ok(adem_reduce_with(&w.pairs, p, sched).sorted_terms().into_iter().map(|(s, c)| (signed(c, p), s.to_string())).collect())
}

/// Basis in one degree. kind is one of invariants, B, cokernel, R, coinv.
#[pyfunction]
#[pyo3(signature = (kind, n, d, k=0, prime=3))]
fn basis(kind: &str, n: usize, d: i64, k: i64, prime: u32) -> PyResult<Vec<String>> {
    let p = self::prime(prime)?;
    if n == 0 {
        return Err(PyValueError::new_err("rank must be positive"));
    }
    let strs = |v: Vec<IndexString>| v.iter().map(|s| s.to_string()).collect();
    Ok(match kind {
        "invariants" => strs(basis_invariants(n, p, d)),
        "B" => strs(basis_b(n, p, k, d)),
        "cokernel" => strs(basis_cokernel(n, p, d)),
        "R" => basis_r(n, k, d, p).iter().map(|s| s.to_string()).collect(),
        "coinv" => basis_coinv_dual(n, p, (k > 0).then_some(k), d).iter().map(|(_, h)| h.to_string()).collect(),
        other => return Err(PyValueError::new_err(format!("unknown basis kind {other:?}"))),
    })
}

/// Leading admissible string of the E-product for a flat index string (ε_1, i_1, ...).
#[pyfunction]
#[pyo3(signature = (flat, level=0, prime=3))]
fn string_forward(flat: Vec<i64>, level: u32, prime: u32) -> PyResult<String> {
    let p = self::prime(prime)?;
    if !flat.len().is_multiple_of(2) || flat.is_empty() {
        return Err(PyValueError::new_err("expected an even number of entries"));
    }
    forward(level, &IndexString::from_flat(&flat), p).map(|j| j.to_string()).map_err(py_err)
}

/// σ^level ∘ E(ε_1,i_1) ∘ ... expanded in admissible Q-monomials, as (term, coefficient) pairs.
#[pyfunction]
#[pyo3(signature = (factors, level=0, prime=3, budget=400))]
fn e_product(factors: Vec<(u8, i64)>, level: u32, prime: u32, budget: i64) -> PyResult<Vec<(String, i64)>> {
    let p = self::prime(prime)?;
    if factors.iter().any(|&(e, _)| e > 1) {
        return Err(PyValueError::new_err("Bockstein exponents must be 0 or 1"));
    }
    let engine = HopfEngine::new(p, budget);
    let x = product(&engine, level, &factors).map_err(py_err)?;
    let base = if level == 0 { "[1]".to_string() } else { format!("σ^{level}") };
    let coords = q_coordinates(&x).map_err(py_err)?;
    Ok(coords.into_iter().map(|(s, c)| (format!("{s}({base})"), signed(c, p))).collect())
}

#[pyfunction]
fn suites() -> Vec<&'static str> {
    Suite::ALL.iter().map(|s| s.name()).collect()
}

/// Runs a suite (or "all") and returns the reports as a JSON string.
#[pyfunction]
#[pyo3(signature = (suite="all", prime=3, rank=3, degree=30, trunc=12, budget=400, seed=0, samples=500))]
#[allow(clippy::too_many_arguments)]
fn verify(
    py: Python<'_>,
    suite: &str,
    prime: u32,
    rank: usize,
    degree: i64,
    trunc: u32,
    budget: i64,
    seed: u64,
    samples: usize,
) -> PyResult<String> {
    let cfg = VerifyConfig { prime, rank_max: rank, degree_max: degree, trunc, budget, seed, samples };
    let reports = py.detach(|| run_named(suite, &cfg)).map_err(py_err)?;
    serde_json::to_string(&reports).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pymodule]
fn hopfring(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(adem_reduce, m)?)?;
    m.add_function(wrap_pyfunction!(basis, m)?)?;
    m.add_function(wrap_pyfunction!(string_forward, m)?)?;
    m.add_function(wrap_pyfunction!(e_product, m)?)?;
    m.add_function(wrap_pyfunction!(suites, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
