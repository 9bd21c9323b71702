//! Python bindings. Exact integers cross the boundary as Python `int`,
//! fractions as `fractions.Fraction`.

use aplcm_core::verifier::{self, LemmaVerdict, Status};
use aplcm_core::{bounds, lcm_engine, numeric, BoundParams, BoundReport, Family, Nat};
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py_err(err: aplcm_core::Error) -> PyErr {
    match err {
        aplcm_core::Error::Integrality(_) => PyArithmeticError::new_err(err.to_string()),
        _ => PyValueError::new_err(err.to_string()),
    }
}

fn fraction<'py>(py: Python<'py>, rat: &aplcm_core::Rat) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?
        .getattr("Fraction")?
        .call1((rat.numer().clone(), rat.denom().clone()))
}

/// Arithmetic progression `u_k = u0 + k*r` with coprime positive `u0`, `r`.
#[pyclass(frozen, eq, hash, skip_from_py_object, module = "aplcm")]
#[derive(Clone, PartialEq, Eq, Hash)]
struct Progression {
    inner: aplcm_core::Progression,
}

#[pymethods]
impl Progression {
    #[new]
    fn new(u0: u64, r: u64) -> PyResult<Self> {
        aplcm_core::Progression::new(u0, r)
            .map(|inner| Progression { inner })
            .map_err(to_py_err)
    }

    #[getter]
    fn u0(&self) -> u64 {
        self.inner.u0()
    }

    #[getter]
    fn r(&self) -> u64 {
        self.inner.r()
    }

    fn term(&self, k: u64) -> Nat {
        self.inner.term(k)
    }

    fn shift_index(&self, n: u64) -> u64 {
        self.inner.shift_index(n)
    }

    fn window_product(&self, n: u64, k: u64) -> PyResult<Nat> {
        Ok(self.inner.window(n, k).map_err(to_py_err)?.product())
    }

    /// `C_{n,k}` as a `fractions.Fraction`.
    fn c<'py>(&self, py: Python<'py>, n: u64, k: u64) -> PyResult<Bound<'py, PyAny>> {
        let win = self.inner.window(n, k).map_err(to_py_err)?;
        fraction(py, &win.c())
    }

    fn __repr__(&self) -> String {
        format!("Progression(u0={}, r={})", self.inner.u0(), self.inner.r())
    }
}

/// Running `L_n`, extended one term at a time.
#[pyclass(module = "aplcm")]
struct IncrementalState {
    inner: lcm_engine::IncrementalState,
}

#[pymethods]
impl IncrementalState {
    #[new]
    fn new(prog: &Progression) -> Self {
        IncrementalState {
            inner: lcm_engine::IncrementalState::start(prog.inner),
        }
    }

    #[getter]
    fn n(&self) -> u64 {
        self.inner.n()
    }

    #[getter]
    fn lcm(&self) -> Nat {
        self.inner.l_n().clone()
    }

    /// Advances to `n + 1` in place and returns the new `L_n`.
    fn extend(&mut self) -> Nat {
        self.inner = self.inner.extend();
        self.inner.l_n().clone()
    }
}

#[pyfunction]
fn gcd(x: Nat, y: Nat) -> Nat {
    numeric::gcd(&x, &y)
}

#[pyfunction]
fn lcm(x: Nat, y: Nat) -> PyResult<Nat> {
    numeric::lcm(&x, &y).map_err(to_py_err)
}

#[pyfunction]
fn factorial(m: u64) -> Nat {
    numeric::factorial(m)
}

/// List of `(prime, exponent)` pairs.
#[pyfunction]
fn factorize(x: Nat) -> PyResult<Vec<(Nat, u64)>> {
    Ok(numeric::factorize(&x).map_err(to_py_err)?.pairs().to_vec())
}

#[pyfunction]
fn max_power_dividing(base: Nat, x: Nat) -> PyResult<u64> {
    numeric::max_power_dividing(&base, &x).map_err(to_py_err)
}

#[pyfunction]
fn max_power_dividing_factorial(base: Nat, m: u64) -> PyResult<u64> {
    numeric::max_power_dividing_factorial(&base, m).map_err(to_py_err)
}

#[pyfunction]
fn lcm_prefix(prog: &Progression, n: u64) -> Nat {
    lcm_engine::lcm_prefix(&prog.inner, n)
}

#[pyfunction]
fn lcm_suffix(prog: &Progression, n: u64, k: u64) -> PyResult<Nat> {
    lcm_engine::lcm_suffix(&prog.inner, n, k).map_err(to_py_err)
}

#[pyfunction]
fn cofactor(prog: &Progression, n: u64, k: u64) -> PyResult<Nat> {
    lcm_engine::cofactor(&prog.inner, n, k).map_err(to_py_err)
}

/// Dict with `n, k_n, L_n, L_n_kn, C_n_kn, A_n_kn`.
#[pyfunction]
fn record<'py>(py: Python<'py>, prog: &Progression, n: u64) -> PyResult<Bound<'py, PyDict>> {
    let rec = lcm_engine::record(&prog.inner, n).map_err(to_py_err)?;
    let d = PyDict::new(py);
    d.set_item("n", rec.n)?;
    d.set_item("k_n", rec.k_n)?;
    d.set_item("L_n", rec.l_n)?;
    d.set_item("L_n_kn", rec.l_n_kn)?;
    d.set_item("C_n_kn", fraction(py, &rec.c_n_kn)?)?;
    d.set_item("A_n_kn", rec.a_n_kn)?;
    Ok(d)
}

fn params(family: &str, a: Option<u64>, l: Option<u64>, alpha: Option<u64>) -> PyResult<BoundParams> {
    if family.eq_ignore_ascii_case("t14") {
        let need = |v: Option<u64>, name: &str| {
            v.ok_or_else(|| PyValueError::new_err(format!("family t14 requires {name}")))
        };
        return BoundParams::t14(need(a, "a")?, need(alpha, "alpha")?).map_err(to_py_err);
    }
    let family: Family = family.parse().map_err(to_py_err)?;
    BoundParams::for_family(family, a, l, alpha).map_err(to_py_err)
}

#[pyfunction]
#[pyo3(signature = (family, prog, n, a=None, l=None, alpha=None))]
fn hypothesis(family: &str, prog: &Progression, n: u64, a: Option<u64>, l: Option<u64>, alpha: Option<u64>) -> PyResult<bool> {
    Ok(bounds::hypothesis(&params(family, a, l, alpha)?, &prog.inner, n))
}

#[pyfunction]
#[pyo3(signature = (family, prog, n, a=None, l=None, alpha=None))]
fn bound_value(family: &str, prog: &Progression, n: u64, a: Option<u64>, l: Option<u64>, alpha: Option<u64>) -> PyResult<Nat> {
    bounds::bound_value(&params(family, a, l, alpha)?, &prog.inner, n).map_err(to_py_err)
}

fn report_dict<'py>(py: Python<'py>, rep: &BoundReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("u0", rep.prog.u0())?;
    d.set_item("r", rep.prog.r())?;
    d.set_item("n", rep.n)?;
    d.set_item("family", rep.params.family().name())?;
    d.set_item("a", rep.params.a())?;
    d.set_item("l", rep.params.l())?;
    d.set_item("alpha", rep.params.alpha())?;
    d.set_item("hypothesis_ok", rep.hypothesis_ok)?;
    d.set_item("holds", rep.holds)?;
    d.set_item("bound", rep.bound.clone())?;
    d.set_item("L_n", rep.l_n.clone())?;
    d.set_item("gap_log", rep.gap_log)?;
    Ok(d)
}

/// Computes `L_n` and checks the family's bound against it.
#[pyfunction]
#[pyo3(signature = (family, prog, n, a=None, l=None, alpha=None))]
fn check<'py>(
    py: Python<'py>,
    family: &str,
    prog: &Progression,
    n: u64,
    a: Option<u64>,
    l: Option<u64>,
    alpha: Option<u64>,
) -> PyResult<Bound<'py, PyDict>> {
    let params = params(family, a, l, alpha)?;
    let l_n = lcm_engine::lcm_prefix(&prog.inner, n);
    report_dict(py, &bounds::check(&params, &prog.inner, n, &l_n))
}

fn verdict_dict<'py>(py: Python<'py>, v: &LemmaVerdict) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("lemma", v.lemma.name())?;
    d.set_item("u0", v.instance.u0)?;
    d.set_item("r", v.instance.r)?;
    d.set_item("n", v.instance.n)?;
    d.set_item("a", v.instance.a)?;
    d.set_item("l", v.instance.l)?;
    d.set_item("alpha", v.instance.alpha)?;
    d.set_item(
        "status",
        match v.status {
            Status::Verified => "verified",
            Status::Failed => "failed",
            Status::Filtered => "filtered",
        },
    )?;
    d.set_item("ok", v.ok())?;
    d.set_item("witness", v.witness.clone())?;
    Ok(d)
}

/// Runs one named check: `l2_1`, `l2_2`, `ineq_2_3` take `(prog, n)`;
/// `l2_3`, `div_factorial`, `div_cofactor` also take `a, l, alpha`;
/// `ineq_2_5` uses only `prog.r` and `a, l, alpha`.
#[pyfunction]
#[pyo3(signature = (lemma, prog, n=1, a=None, l=None, alpha=None))]
fn verify<'py>(
    py: Python<'py>,
    lemma: &str,
    prog: &Progression,
    n: u64,
    a: Option<u64>,
    l: Option<u64>,
    alpha: Option<u64>,
) -> PyResult<Bound<'py, PyDict>> {
    let id: verifier::LemmaId = lemma.parse().map_err(to_py_err)?;
    let p = &prog.inner;
    let triple = || -> PyResult<(u64, u64, u64)> {
        match (a, l, alpha) {
            (Some(a), Some(l), Some(alpha)) => Ok((a, l, alpha)),
            _ => Err(PyValueError::new_err(format!("{lemma} requires a, l and alpha"))),
        }
    };
    let verdict = match id {
        verifier::LemmaId::L2_1 => verifier::verify_lemma_2_1(p, n),
        verifier::LemmaId::L2_2 => verifier::verify_lemma_2_2(p, n).map_err(to_py_err)?,
        verifier::LemmaId::Ineq2_3 => verifier::verify_ineq_2_3(p, n),
        verifier::LemmaId::L2_3 => {
            let (a, l, alpha) = triple()?;
            verifier::verify_lemma_2_3(p, a, l, alpha, n)
        }
        verifier::LemmaId::DivFactorial => {
            let (a, l, alpha) = triple()?;
            verifier::verify_div_factorial(p, a, l, alpha, n)
        }
        verifier::LemmaId::DivCofactor => {
            let (a, l, alpha) = triple()?;
            verifier::verify_div_cofactor(p, a, l, alpha, n).map_err(to_py_err)?
        }
        verifier::LemmaId::Ineq2_5 => {
            let (a, l, alpha) = triple()?;
            verifier::verify_ineq_2_5(a, l, alpha, p.r())
        }
    };
    verdict_dict(py, &verdict)
}

/// Runs a sweep from a JSON config string (SweepConfig field names). Returns
/// the summary counts plus `reports` and `verdicts` lists when `rows` is set.
#[pyfunction]
#[pyo3(signature = (config_json, jobs=1, rows=false))]
fn sweep<'py>(py: Python<'py>, config_json: &str, jobs: usize, rows: bool) -> PyResult<Bound<'py, PyDict>> {
    let config: verifier::SweepConfig =
        serde_json::from_str(config_json).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let outcome = py
        .detach(|| aplcm_core::sweep_with_jobs(&config, jobs))
        .map_err(to_py_err)?;
    let d = PyDict::new(py);
    d.set_item("total_cells", outcome.total_cells)?;
    d.set_item("hypothesis_filtered", outcome.hypothesis_filtered)?;
    d.set_item("verified", outcome.verified)?;
    d.set_item("failed", outcome.failed)?;
    d.set_item("coprime_skipped", outcome.coprime_skipped)?;
    d.set_item("min_gap_log", outcome.min_gap.as_ref().map(|m| m.gap_log))?;
    if rows {
        let reports = outcome
            .reports
            .iter()
            .map(|r| report_dict(py, r))
            .collect::<PyResult<Vec<_>>>()?;
        let verdicts = outcome
            .verdicts
            .iter()
            .map(|v| verdict_dict(py, v))
            .collect::<PyResult<Vec<_>>>()?;
        d.set_item("reports", reports)?;
        d.set_item("verdicts", verdicts)?;
    }
    Ok(d)
}

#[pymodule]
fn aplcm(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Progression>()?;
    m.add_class::<IncrementalState>()?;
    m.add_function(wrap_pyfunction!(gcd, m)?)?;
    m.add_function(wrap_pyfunction!(lcm, m)?)?;
    m.add_function(wrap_pyfunction!(factorial, m)?)?;
    m.add_function(wrap_pyfunction!(factorize, m)?)?;
    m.add_function(wrap_pyfunction!(max_power_dividing, m)?)?;
    m.add_function(wrap_pyfunction!(max_power_dividing_factorial, m)?)?;
    m.add_function(wrap_pyfunction!(lcm_prefix, m)?)?;
    m.add_function(wrap_pyfunction!(lcm_suffix, m)?)?;
    m.add_function(wrap_pyfunction!(cofactor, m)?)?;
    m.add_function(wrap_pyfunction!(record, m)?)?;
    m.add_function(wrap_pyfunction!(hypothesis, m)?)?;
    m.add_function(wrap_pyfunction!(bound_value, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    Ok(())
}
