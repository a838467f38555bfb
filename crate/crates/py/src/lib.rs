//! Python bindings: the reduction-data pipeline, J(n), Smith normal form,
//! the classical-group order criteria and their spectrum oracles, and the
//! perfectization of invariant forms.
//!
//! Matrices cross the boundary as nested lists of Python ints; rational
//! entries (which only arise over the localized rings) come back as
//! `"a/b"` strings. Reports are plain dicts mirroring the CLI's JSON.

use num_bigint::BigInt;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use pyo3::IntoPyObjectExt;

use semistable::bounds::{self, BoundReport, ReportOptions};
use semistable::classical::{self, GroupFamily, PrimePower, SpectrumMethod};
use semistable::group::{close_group, MatrixGroup, DEFAULT_CLOSURE_CAP};
use semistable::matrix::Mat;
use semistable::pairing::{self, FormKind, GramForm};
use semistable::ring::LocalRing;
use semistable::{Error, FactoredInt};

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn mat_from_py(rows: Vec<Vec<BigInt>>) -> PyResult<Mat> {
    let scalars = rows
        .into_iter()
        .map(|row| row.into_iter().map(semistable::ring::big).collect())
        .collect();
    Mat::from_rows(scalars).map_err(err)
}

fn mat_to_py<'py>(py: Python<'py>, m: &Mat) -> PyResult<Bound<'py, PyList>> {
    let outer = PyList::empty(py);
    for i in 0..m.rows() {
        let row = PyList::empty(py);
        for j in 0..m.cols() {
            let x = &m[(i, j)];
            if x.is_integer() {
                row.append(x.numer().clone())?;
            } else {
                row.append(format!("{}/{}", x.numer(), x.denom()))?;
            }
        }
        outer.append(row)?;
    }
    Ok(outer)
}

fn factored_to_py<'py>(py: Python<'py>, f: &FactoredInt) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("factored", f.factored_string())?;
    d.set_item("value", f.to_bigint())?;
    Ok(d)
}

fn json_to_py(py: Python<'_>, v: &serde_json::Value) -> PyResult<Py<PyAny>> {
    match v {
        serde_json::Value::Null => Ok(py.None()),
        serde_json::Value::Bool(b) => b.into_py_any(py),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_py_any(py)
            } else if let Some(u) = n.as_u64() {
                u.into_py_any(py)
            } else {
                n.as_f64().unwrap().into_py_any(py)
            }
        }
        serde_json::Value::String(s) => s.into_py_any(py),
        serde_json::Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_py_any(py)
        }
        serde_json::Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, json_to_py(py, item)?)?;
            }
            dict.into_py_any(py)
        }
    }
}

/// Numeric reduction data of an abelian variety at a discrete valuation.
#[pyclass(name = "ReductionData", skip_from_py_object)]
#[derive(Clone)]
struct PyReductionData {
    inner: bounds::ReductionData,
}

#[pymethods]
impl PyReductionData {
    #[new]
    #[pyo3(signature = (d, p, t, a, t_v, a_v, deg_lambda=None))]
    fn new(d: u32, p: u64, t: u32, a: u32, t_v: u32, a_v: u32, deg_lambda: Option<u64>) -> PyResult<Self> {
        let inner = bounds::ReductionData { d, p, t, a, t_v, a_v, deg_lambda };
        inner.validate().map_err(err)?;
        Ok(PyReductionData { inner })
    }

    fn is_semistable(&self) -> bool {
        self.inner.is_semistable()
    }

    #[getter]
    fn m(&self) -> u32 {
        bounds::m_of(&self.inner)
    }

    #[getter]
    fn q_bound(&self) -> u32 {
        bounds::q_bound(&self.inner)
    }

    /// The certified multiple of the obstruction group order.
    fn n<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        factored_to_py(py, &bounds::n_of(&self.inner))
    }

    #[pyo3(signature = (prime_sample=50))]
    fn admissible_orders(&self, prime_sample: usize) -> PyResult<Vec<BigInt>> {
        let primes = bounds::default_prime_sample(prime_sample);
        let orders = bounds::admissible_orders(&self.inner, &primes).map_err(err)?;
        Ok(orders.iter().map(|o| o.to_bigint()).collect())
    }

    #[pyo3(signature = (bound=100))]
    fn safe_primes(&self, bound: u64) -> PyResult<Vec<u64>> {
        bounds::safe_primes(&self.inner, bound).map_err(err)
    }

    /// Full bound report as a dict (same shape as the CLI JSON).
    #[pyo3(signature = (prime_sample=50, safe_prime_bound=100))]
    fn report(&self, py: Python<'_>, prime_sample: usize, safe_prime_bound: u64) -> PyResult<Py<PyAny>> {
        let options = ReportOptions { prime_sample_count: prime_sample, safe_prime_bound };
        let report = BoundReport::compute(&self.inner, &options).map_err(err)?;
        let value = serde_json::to_value(&report)
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        json_to_py(py, &value)
    }

    fn __repr__(&self) -> String {
        format!(
            "ReductionData(d={}, p={}, t={}, a={}, t_v={}, a_v={}, deg_lambda={:?})",
            self.inner.d, self.inner.p, self.inner.t, self.inner.a, self.inner.t_v,
            self.inner.a_v, self.inner.deg_lambda
        )
    }
}

/// s(n, q): the exponent of q in J(n).
#[pyfunction]
fn s(n: u32, q: u64) -> PyResult<u32> {
    if !semistable::arith::is_prime(q) {
        return Err(err(Error::NotPrime(q)));
    }
    Ok(bounds::s(n, q))
}

/// J(n) as a dict {"factored": str, "value": int}.
#[pyfunction]
fn jn(py: Python<'_>, n: u32) -> PyResult<Bound<'_, PyDict>> {
    factored_to_py(py, &bounds::j_bound(n))
}

/// Least d with ell^d = 1 mod n.
#[pyfunction]
fn mult_order(ell: u64, n: u64) -> PyResult<u64> {
    classical::mult_order(ell, n).map_err(err)
}

/// Does GL_n(F_ell) contain an element of exact order q^r?
#[pyfunction]
fn gl_has_element_of_order(n: usize, q: u64, r: u32, ell: u64) -> PyResult<bool> {
    let pp = PrimePower::new(q, r).map_err(err)?;
    classical::gl_has_element_of_order(n, pp, ell).map_err(err)
}

/// Does Sp_2m(F_ell) contain an element of exact order q^r?
#[pyfunction]
fn sp_has_element_of_order(m: usize, q: u64, r: u32, ell: u64) -> PyResult<bool> {
    let pp = PrimePower::new(q, r).map_err(err)?;
    classical::sp_has_element_of_order(m, pp, ell).map_err(err)
}

/// |Sp_2m(F_ell)| as a dict {"factored": str, "value": int}.
#[pyfunction]
fn sp_group_order(py: Python<'_>, m: usize, ell: u64) -> PyResult<Bound<'_, PyDict>> {
    factored_to_py(py, &classical::sp_group_order(m, ell).map_err(err)?)
}

/// Element orders of Sp_2m(F_ell), exhaustively when the group order fits
/// the budget and by seeded sampling otherwise.
#[pyfunction]
#[pyo3(signature = (m, ell, samples=None, seed=0, budget=1_000_000))]
fn sp_order_spectrum(m: usize, ell: u64, samples: Option<u64>, seed: u64, budget: u64) -> PyResult<Vec<u64>> {
    let method = match samples {
        Some(count) => SpectrumMethod::Sampled { count, seed },
        None => {
            let order = classical::sp_group_order(m, ell).map_err(err)?;
            if order.to_u64().map(|o| o <= budget).unwrap_or(false) {
                SpectrumMethod::Exhaustive
            } else {
                SpectrumMethod::Sampled { count: classical::DEFAULT_SAMPLE_COUNT, seed }
            }
        }
    };
    let spectrum =
        classical::brute_force_spectrum(GroupFamily::Sp, 2 * m, ell, method, budget).map_err(err)?;
    Ok(spectrum.orders.into_iter().collect())
}

/// Coefficients of the n-th cyclotomic polynomial, ascending.
#[pyfunction]
fn cyclotomic_poly(n: u64) -> Vec<BigInt> {
    classical::cyclotomic_poly(n)
}

/// Smith normal form over the integers: dict with "u", "d", "v" such that
/// u a v = d.
#[pyfunction]
fn snf(py: Python<'_>, rows: Vec<Vec<BigInt>>) -> PyResult<Bound<'_, PyDict>> {
    let a = mat_from_py(rows)?;
    let s = semistable::snf::snf(&a).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("u", mat_to_py(py, &s.u)?)?;
    d.set_item("d", mat_to_py(py, &s.d)?)?;
    d.set_item("v", mat_to_py(py, &s.v)?)?;
    Ok(d)
}

/// Build a perfect invariant form over Z_(ell) from a non-degenerate one.
///
/// `kind` is "alternating" or "symmetric"; `generators` generate a finite
/// group of order prime to ell. The result dict reports the new Gram
/// matrix, the change of basis, and the ell-adic precision used (None when
/// the output is exact over the localization).
#[pyfunction]
#[pyo3(signature = (gram, ell, kind="alternating", generators=vec![], precision=8))]
fn perfectize<'py>(
    py: Python<'py>,
    gram: Vec<Vec<BigInt>>,
    ell: u64,
    kind: &str,
    generators: Vec<Vec<Vec<BigInt>>>,
    precision: u32,
) -> PyResult<Bound<'py, PyDict>> {
    let kind = match kind {
        "alternating" => FormKind::Alternating,
        "symmetric" => FormKind::Symmetric,
        other => return Err(PyValueError::new_err(format!("unknown form kind `{other}`"))),
    };
    let ring = LocalRing::localized_at(ell).map_err(err)?;
    let gram = mat_from_py(gram)?;
    let rank = gram.rows();
    let form = GramForm::new(ring, kind, gram).map_err(err)?;
    let gens: Vec<Mat> = generators.into_iter().map(mat_from_py).collect::<PyResult<_>>()?;
    let group = if gens.is_empty() {
        MatrixGroup::trivial(ring, rank)
    } else {
        close_group(ring, &gens, DEFAULT_CLOSURE_CAP).map_err(err)?
    };
    let out = pairing::perfectize(&form, &group, precision).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("gram", mat_to_py(py, &out.form.gram)?)?;
    d.set_item("basis_change", mat_to_py(py, &out.basis_change)?)?;
    d.set_item("precision", out.precision)?;
    d.set_item("ring", out.form.ring.to_string())?;
    Ok(d)
}

/// Run the oracle verification suites; returns a list of
/// {"name", "passed", "details"} dicts.
#[pyfunction]
#[pyo3(signature = (quick=true))]
fn verify(py: Python<'_>, quick: bool) -> PyResult<Vec<Bound<'_, PyDict>>> {
    semistable::verify::run_suites(quick)
        .into_iter()
        .map(|o| {
            let d = PyDict::new(py);
            d.set_item("name", o.name)?;
            d.set_item("passed", o.passed)?;
            d.set_item("details", o.details)?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
fn semistable_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyReductionData>()?;
    m.add_function(wrap_pyfunction!(s, m)?)?;
    m.add_function(wrap_pyfunction!(jn, m)?)?;
    m.add_function(wrap_pyfunction!(mult_order, m)?)?;
    m.add_function(wrap_pyfunction!(gl_has_element_of_order, m)?)?;
    m.add_function(wrap_pyfunction!(sp_has_element_of_order, m)?)?;
    m.add_function(wrap_pyfunction!(sp_group_order, m)?)?;
    m.add_function(wrap_pyfunction!(sp_order_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(cyclotomic_poly, m)?)?;
    m.add_function(wrap_pyfunction!(snf, m)?)?;
    m.add_function(wrap_pyfunction!(perfectize, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
