//! Python bindings. Structured results cross the boundary as JSON strings.

use std::sync::Arc;

use hofix_core::bisim::{
    dimmed_bisim as core_dimmed, lemma1_check as core_lemma1, value_bisim as core_value, LtsJson, LtsSpec,
};
use hofix_core::engine::{solve_hob, EngineConfig, OuterStatus, SolutionReport};
use hofix_core::functor::{parse, Constants};
use hofix_core::laws::check_laws as core_check_laws;
use hofix_core::mediator::{adjunction_check as core_adjunction, solve_lifted as core_solve_lifted};
use hofix_core::order::{self, iso_check, FinPoset, PosetJson};
use hofix_core::relation::{EquivalenceJson, Relation};
use hofix_core::Error;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn py_err(e: Error) -> PyErr {
    PyValueError::new_err(format!("{}: {e}", e.code()))
}

fn json_err(e: serde_json::Error) -> PyErr {
    PyValueError::new_err(format!("ParseError: {e}"))
}

fn to_json<T: serde::Serialize>(v: &T) -> PyResult<String> {
    serde_json::to_string(v).map_err(json_err)
}

fn from_json<T: serde::de::DeserializeOwned>(text: &str) -> PyResult<T> {
    serde_json::from_str(text).map_err(json_err)
}

/// A finite poset.
#[pyclass(frozen, skip_from_py_object, name = "Poset", module = "hofix")]
pub struct Poset {
    inner: Arc<FinPoset>,
}

impl Poset {
    fn wrap(p: FinPoset) -> Self {
        Poset { inner: Arc::new(p) }
    }
}

#[pymethods]
impl Poset {
    #[staticmethod]
    fn chain(n: usize) -> Self {
        Poset::wrap(order::chain(n))
    }

    #[staticmethod]
    fn discrete(names: Vec<String>) -> PyResult<Self> {
        order::discrete(&names).map(Poset::wrap).map_err(py_err)
    }

    #[staticmethod]
    fn boolean_lattice() -> Self {
        Poset::wrap(order::boolean_lattice())
    }

    #[staticmethod]
    fn one() -> Self {
        Poset::wrap(order::one())
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let j: PosetJson = from_json(text)?;
        FinPoset::from_json(&j).map(Poset::wrap).map_err(py_err)
    }

    fn to_json(&self) -> PyResult<String> {
        to_json(&self.inner.to_json())
    }

    #[pyo3(signature = (name = "P"))]
    fn to_dot(&self, name: &str) -> String {
        self.inner.to_dot(name)
    }

    /// Adds a fresh bottom below everything.
    fn lift(&self) -> Self {
        Poset::wrap(order::lift(&self.inner))
    }

    fn ids(&self) -> Vec<String> {
        self.inner.ids().to_vec()
    }

    fn leq(&self, a: &str, b: &str) -> PyResult<bool> {
        let idx = |s: &str| self.inner.index_of(s).ok_or_else(|| py_err(Error::UnknownElement(s.to_string())));
        Ok(self.inner.leq(idx(a)?, idx(b)?))
    }

    fn bottom(&self) -> Option<String> {
        self.inner.bottom().map(|b| self.inner.id(b).to_string())
    }

    fn is_isomorphic(&self, other: &Poset) -> PyResult<bool> {
        Ok(iso_check(&self.inner, &other.inner).map_err(py_err)?.is_some())
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Poset({} elements)", self.inner.len())
    }
}

/// Outcome of `solve`.
#[pyclass(frozen, name = "Solution", module = "hofix")]
pub struct Solution {
    report: SolutionReport,
}

#[pymethods]
impl Solution {
    /// `"solved"` or `"truncated"`.
    #[getter]
    fn status(&self) -> &'static str {
        match self.report.chain.status {
            OuterStatus::Solved(_) => "solved",
            OuterStatus::Truncated(_) => "truncated",
        }
    }

    #[getter]
    fn solved(&self) -> bool {
        self.report.is_solved()
    }

    /// Outer level at which the chain stopped growing, if it did.
    #[getter]
    fn level(&self) -> Option<usize> {
        match self.report.chain.status {
            OuterStatus::Solved(n) => Some(n),
            OuterStatus::Truncated(_) => None,
        }
    }

    #[getter]
    fn param_sizes(&self) -> Vec<usize> {
        self.report.param_sizes()
    }

    /// The solution, or the last approximant when truncated.
    #[getter]
    fn z(&self) -> Poset {
        Poset { inner: self.report.z.clone() }
    }

    fn to_json(&self) -> PyResult<String> {
        to_json(&self.report.to_json())
    }

    fn __repr__(&self) -> String {
        format!("Solution({}, sizes={:?})", self.status(), self.report.param_sizes())
    }
}

fn constants(items: Vec<(String, PyRef<'_, Poset>)>) -> PyResult<Constants> {
    let mut c = Constants::new();
    for (name, p) in items {
        c = c.with(&name, (*p.inner).clone()).map_err(py_err)?;
    }
    Ok(c)
}

fn lts(text: &str) -> PyResult<LtsSpec> {
    LtsSpec::from_json(&from_json::<LtsJson>(text)?).map_err(py_err)
}

fn approx(text: Option<&str>, l: &LtsSpec) -> PyResult<Relation> {
    match text {
        Some(t) => from_json::<EquivalenceJson>(t)?.resolve(&l.value_set()).map_err(py_err),
        None => Ok(Relation::identity(l.values.len())),
    }
}

fn relation_pairs(r: &Relation, a: &LtsSpec, b: &LtsSpec) -> Vec<(String, String)> {
    r.pairs().into_iter().map(|(x, y)| (a.states[x].clone(), b.states[y].clone())).collect()
}

/// Solves the fixed-point equation for a functor expression.
#[pyfunction]
#[pyo3(signature = (expr, constants = Vec::new(), inner_budget = 8, outer_budget = 6, element_cap = 512))]
fn solve(
    expr: &str,
    constants: Vec<(String, PyRef<'_, Poset>)>,
    inner_budget: usize,
    outer_budget: usize,
    element_cap: usize,
) -> PyResult<Solution> {
    let c = self::constants(constants)?;
    let e = parse(expr, &c).map_err(py_err)?;
    let config = EngineConfig { inner_budget, outer_budget, element_cap };
    let report = solve_hob(&e, &c, config).map_err(py_err)?;
    Ok(Solution { report })
}

/// Greatest bisimulation between two LTS given as JSON, as a list of state pairs.
#[pyfunction]
fn value_bisim(left: &str, right: &str) -> PyResult<Vec<(String, String)>> {
    let (a, b) = (lts(left)?, lts(right)?);
    let r = core_value(&a, &b).map_err(py_err)?;
    Ok(relation_pairs(&r, &a, &b))
}

/// Greatest bisimulation up to an equivalence on values (`{"blocks": [...]}`).
#[pyfunction]
#[pyo3(signature = (left, right, approx = None))]
fn dimmed_bisim(left: &str, right: &str, approx: Option<&str>) -> PyResult<Vec<(String, String)>> {
    let (a, b) = (lts(left)?, lts(right)?);
    let eq = self::approx(approx, &a)?;
    let r = core_dimmed(&a, &b, &eq).map_err(py_err)?;
    Ok(relation_pairs(&r, &a, &b))
}

/// Compares the game and coalgebraic bisimulation predicates; returns a JSON report.
#[pyfunction]
#[pyo3(signature = (lts, approx = None, exhaustive = false))]
fn lemma1_check(lts: &str, approx: Option<&str>, exhaustive: bool) -> PyResult<String> {
    let l = self::lts(lts)?;
    let eq = self::approx(approx, &l)?;
    to_json(&core_lemma1(&l, &eq, exhaustive).map_err(py_err)?)
}

/// Runs a lifted expression in both backends and compares them stagewise; returns a JSON report.
#[pyfunction]
#[pyo3(signature = (expr, constants = Vec::new(), v = None, w = None, inner_budget = 8, element_cap = 512))]
fn solve_lifted(
    expr: &str,
    constants: Vec<(String, PyRef<'_, Poset>)>,
    v: Option<PyRef<'_, Poset>>,
    w: Option<PyRef<'_, Poset>>,
    inner_budget: usize,
    element_cap: usize,
) -> PyResult<String> {
    let c = self::constants(constants)?;
    let e = parse(expr, &c).map_err(py_err)?;
    let v = v.map(|p| (*p.inner).clone()).unwrap_or_else(order::one);
    let w = w.map(|p| (*p.inner).clone()).unwrap_or_else(order::one);
    let rep = core_solve_lifted(&e, &c, &v, &w, inner_budget, element_cap).map_err(py_err)?;
    to_json(&rep.to_json())
}

/// Checks the lift/inclusion adjunction on one pair of posets.
#[pyfunction]
fn adjunction_check(p: PyRef<'_, Poset>, q: PyRef<'_, Poset>) -> PyResult<bool> {
    Ok(core_adjunction(&p.inner, &q.inner).map_err(py_err)?.holds)
}

/// Runs the seeded property suites; returns `(ok, transcript)`.
#[pyfunction]
#[pyo3(signature = (seed = 42))]
fn check_laws(py: Python<'_>, seed: u64) -> PyResult<(bool, String)> {
    let rep = py.detach(|| core_check_laws(seed)).map_err(py_err)?;
    Ok((rep.ok(), rep.transcript()))
}

#[pymodule]
pub fn hofix(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Poset>()?;
    m.add_class::<Solution>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(value_bisim, m)?)?;
    m.add_function(wrap_pyfunction!(dimmed_bisim, m)?)?;
    m.add_function(wrap_pyfunction!(lemma1_check, m)?)?;
    m.add_function(wrap_pyfunction!(solve_lifted, m)?)?;
    m.add_function(wrap_pyfunction!(adjunction_check, m)?)?;
    m.add_function(wrap_pyfunction!(check_laws, m)?)?;
    Ok(())
}
