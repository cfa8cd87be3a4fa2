//! Python bindings. Rationals cross the boundary as `fractions.Fraction`,
//! reports as plain dicts decoded from the JSON the CLI emits.

use mirrorint::corpus;
use mirrorint::landau::FactorialRatioSpec;
use mirrorint::mirror::{self, MirrorMaps};
use mirrorint::padic::{self, ScanBounds, Valuation};
use mirrorint::series::TruncatedSeries;
use mirrorint::zhou::{self, ZhouInstance};
use num_bigint::BigInt;
use num_rational::BigRational;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

fn err(e: mirrorint::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn fraction<'py>(py: Python<'py>, x: &BigRational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?
        .getattr("Fraction")?
        .call1((format!("{}/{}", x.numer(), x.denom()),))
}

fn big_int<'py>(py: Python<'py>, x: &impl ToString) -> PyResult<Bound<'py, PyAny>> {
    py.import("builtins")?.getattr("int")?.call1((x.to_string(),))
}

/// Accepts `int`, `Fraction`, or a string such as `"3/7"`.
fn rational(x: &Bound<'_, PyAny>) -> PyResult<BigRational> {
    let text = x.str()?.to_string();
    let bad = || PyValueError::new_err(format!("not a rational: {text:?}"));
    let (n, d) = text.split_once('/').unwrap_or((text.as_str(), "1"));
    let n: BigInt = n.trim().parse().map_err(|_| bad())?;
    let d: BigInt = d.trim().parse().map_err(|_| bad())?;
    if d == BigInt::from(0) {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

#[pyclass(name = "FactorialRatioSpec", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySpec {
    inner: FactorialRatioSpec,
}

#[pymethods]
impl PySpec {
    #[new]
    fn new(e: Vec<u64>, f: Vec<u64>) -> PyResult<Self> {
        Ok(Self {
            inner: FactorialRatioSpec::new(e, f).map_err(err)?,
        })
    }

    /// Parses `"6/3,2,1"`.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: text.parse().map_err(err)?,
        })
    }

    #[getter]
    fn e(&self) -> Vec<u64> {
        self.inner.e().to_vec()
    }

    #[getter]
    fn f(&self) -> Vec<u64> {
        self.inner.f().to_vec()
    }

    #[getter]
    fn m(&self) -> u64 {
        self.inner.m()
    }

    fn is_balanced(&self) -> bool {
        self.inner.is_balanced()
    }

    fn q_ratio<'py>(&self, py: Python<'py>, n: u64) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &self.inner.q_ratio(n))
    }

    fn delta_at<'py>(&self, py: Python<'py>, x: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
        big_int(py, &self.inner.delta_at(&rational(x)?))
    }

    fn classify<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.classify())
    }

    fn profile<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.profile())
    }

    /// `D_L = lcm(1, ..., floor(M/L))`.
    fn root_bound<'py>(&self, py: Python<'py>, l: u64) -> PyResult<Bound<'py, PyAny>> {
        big_int(py, &self.inner.root_bound_dl(l).map_err(err)?)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("FactorialRatioSpec.parse({:?})", self.inner.to_string())
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }
}

#[pyclass(name = "TruncatedSeries", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySeries {
    inner: TruncatedSeries,
}

impl From<TruncatedSeries> for PySeries {
    fn from(inner: TruncatedSeries) -> Self {
        Self { inner }
    }
}

#[pymethods]
impl PySeries {
    #[new]
    fn new(coefficients: Vec<Bound<'_, PyAny>>) -> PyResult<Self> {
        let cs = coefficients.iter().map(rational).collect::<PyResult<Vec<_>>>()?;
        Ok(TruncatedSeries::new(cs).map_err(err)?.into())
    }

    #[getter]
    fn order(&self) -> usize {
        self.inner.order()
    }

    fn coefficients<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyAny>>> {
        self.inner.coeffs().iter().map(|c| fraction(py, c)).collect()
    }

    fn exp(&self) -> PyResult<Self> {
        Ok(self.inner.exp().map_err(err)?.into())
    }

    fn log(&self) -> PyResult<Self> {
        Ok(self.inner.log().map_err(err)?.into())
    }

    fn vth_root(&self, v: u64) -> PyResult<Self> {
        Ok(self.inner.vth_root(v).map_err(err)?.into())
    }

    fn reciprocal(&self) -> PyResult<Self> {
        Ok(self.inner.reciprocal().map_err(err)?.into())
    }

    fn pow(&self, k: i64) -> PyResult<Self> {
        Ok(self.inner.pow(k).map_err(err)?.into())
    }

    fn substitute_power(&self, p: usize) -> Self {
        self.inner.substitute_power(p).into()
    }

    fn integrality<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.integrality())
    }

    fn max_root_exponent<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.max_root_exponent().map_err(err)?)
    }

    fn __add__(&self, other: &Self) -> Self {
        (&self.inner + &other.inner).into()
    }

    fn __sub__(&self, other: &Self) -> Self {
        (&self.inner - &other.inner).into()
    }

    fn __mul__(&self, other: &Self) -> Self {
        (&self.inner * &other.inner).into()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __len__(&self) -> usize {
        self.inner.order() + 1
    }

    fn __repr__(&self) -> String {
        let shown: Vec<String> = self.inner.coeffs().iter().take(6).map(|c| c.to_string()).collect();
        let more = if self.inner.order() >= 6 { ", ..." } else { "" };
        format!("TruncatedSeries([{}{more}], order={})", shown.join(", "), self.inner.order())
    }
}

fn maps(spec: &PySpec, order: usize) -> PyResult<MirrorMaps> {
    MirrorMaps::new(&spec.inner, order).map_err(err)
}

/// `F(z) = sum Q(n) z^n`.
#[pyfunction]
fn hypergeometric_series(spec: &PySpec, order: usize) -> PyResult<PySeries> {
    Ok(maps(spec, order)?.f().clone().into())
}

/// `z^-1 q(z) = exp(G/F)`.
#[pyfunction]
fn q_reduced(spec: &PySpec, order: usize) -> PyResult<PySeries> {
    Ok(maps(spec, order)?.q_reduced().into())
}

/// `q_L(z) = exp(G_L/F)`.
#[pyfunction]
fn q_l(spec: &PySpec, l: u64, order: usize) -> PyResult<PySeries> {
    Ok(maps(spec, order)?.q_l(l).map_err(err)?.into())
}

#[pyfunction]
fn verify_root_bounds<'py>(py: Python<'py>, spec: &PySpec, order: usize) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &mirror::verify_root_bounds(&spec.inner, order).map_err(err)?)
}

#[pyfunction]
fn root_exponent_for_q<'py>(py: Python<'py>, spec: &PySpec, theta: u64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &mirror::root_exponent_for_q(&spec.inner, theta).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (spec, prime_bound = 200, order = 60))]
fn nonintegrality_witness<'py>(
    py: Python<'py>,
    spec: &PySpec,
    prime_bound: u64,
    order: usize,
) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &mirror::nonintegrality_witness(&spec.inner, prime_bound, order).map_err(err)?)
}

/// `v_p(x)`, or `None` for `x = 0`.
#[pyfunction]
fn vp_rational(x: &Bound<'_, PyAny>, p: u64) -> PyResult<Option<i64>> {
    Ok(match padic::vp_rational(&rational(x)?, p).map_err(err)? {
        Valuation::Finite(v) => Some(v),
        Valuation::Infinite => None,
    })
}

#[pyfunction]
fn dwork_quotient_test<'py>(py: Python<'py>, series: &PySeries, p: u64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &padic::dwork_quotient_test(&series.inner, p).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (spec, l, p, k_max = 10))]
fn phi_membership_scan<'py>(
    py: Python<'py>,
    spec: &PySpec,
    l: u64,
    p: u64,
    k_max: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let bounds = ScanBounds {
        k_max,
        ..ScanBounds::default()
    };
    to_py(py, &padic::phi_membership_scan(&spec.inner, l, p, &bounds).map_err(err)?)
}

#[pyfunction]
fn enumerate_decompositions(n: u64) -> PyResult<Vec<Vec<u64>>> {
    Ok(zhou::enumerate_decompositions(n)
        .map_err(err)?
        .into_iter()
        .map(|i| i.ks)
        .collect())
}

#[pyfunction]
fn verify_zhou<'py>(py: Python<'py>, ks: Vec<u64>, order: usize) -> PyResult<Bound<'py, PyAny>> {
    let inst = ZhouInstance::from_ks(ks).map_err(err)?;
    to_py(py, &zhou::verify_zhou(&inst, order).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (order = 40))]
fn run_corpus<'py>(py: Python<'py>, order: usize) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &corpus::run(&corpus::builtin(), order, None).map_err(err)?)
}

#[pymodule]
#[pyo3(name = "mirrorint")]
fn mirrorint_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySpec>()?;
    m.add_class::<PySeries>()?;
    m.add_function(wrap_pyfunction!(hypergeometric_series, m)?)?;
    m.add_function(wrap_pyfunction!(q_reduced, m)?)?;
    m.add_function(wrap_pyfunction!(q_l, m)?)?;
    m.add_function(wrap_pyfunction!(verify_root_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(root_exponent_for_q, m)?)?;
    m.add_function(wrap_pyfunction!(nonintegrality_witness, m)?)?;
    m.add_function(wrap_pyfunction!(vp_rational, m)?)?;
    m.add_function(wrap_pyfunction!(dwork_quotient_test, m)?)?;
    m.add_function(wrap_pyfunction!(phi_membership_scan, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_decompositions, m)?)?;
    m.add_function(wrap_pyfunction!(verify_zhou, m)?)?;
    m.add_function(wrap_pyfunction!(run_corpus, m)?)?;
    Ok(())
}
