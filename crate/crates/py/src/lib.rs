//! Python bindings for `regnet`.
//!
//! ```python
//! import pyregnet
//! net = pyregnet.Network(open("toggle.grn").read())
//! net.check("EF (a = 1 and b = 0)")["holds"]
//! ```

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use regnet::checker::{resolve_formula, SymbolicChecker, VarOrderKind};
use regnet::dsl::{load_network, parse_formula};
use regnet::pn::{to_dot, to_json};
use regnet::symbolic::Limits;
use regnet::{Diagnostic, Formula, Model, State, StableReport, Verdict};

fn render(origin: &str, diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(|d| format!("{origin}:{d}"))
        .collect::<Vec<_>>()
        .join("\n")
}

fn formula(model: &Model, text: &str) -> Result<Formula, String> {
    let ast = parse_formula(text).map_err(|d| render("query", &d))?;
    resolve_formula(&ast, model.network()).map_err(|d| render("query", &d))
}

fn state(model: &Model, levels: Vec<u32>) -> Result<State, String> {
    let s = State::new(levels);
    if model.network().is_valid_state(&s) {
        Ok(s)
    } else {
        Err(format!("{:?} is not a state of {}", s.levels(), model.network().name()))
    }
}

fn checker(model: &Model) -> SymbolicChecker<'_> {
    SymbolicChecker::new(model, VarOrderKind::Decl, Limits::default())
}

fn check(model: &Model, text: &str) -> Result<Verdict, String> {
    let f = formula(model, text)?;
    checker(model).check(&f).map_err(|e| e.to_string())
}

fn stable(model: &Model, filter: Option<&str>) -> Result<StableReport, String> {
    let f = filter.map(|t| formula(model, t)).transpose()?;
    checker(model).stable(f.as_ref()).map_err(|e| e.to_string())
}

fn levels(s: &State) -> Vec<u32> {
    s.levels().to_vec()
}

/// Problems found in a network description, one `line:col: ...` string each.
#[pyfunction]
fn validate(text: &str) -> Vec<String> {
    match load_network(text) {
        Ok((_, diags)) | Err(diags) => diags.iter().map(ToString::to_string).collect(),
    }
}

/// A validated regulatory network with its compiled net.
#[pyclass(frozen, module = "pyregnet")]
struct Network {
    model: Model,
}

#[pymethods]
impl Network {
    /// Raises `ValueError` listing the diagnostics if the text has errors.
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        let (net, _) = load_network(text).map_err(|d| PyValueError::new_err(render("input", &d)))?;
        Ok(Network {
            model: Model::new(net),
        })
    }

    #[getter]
    fn name(&self) -> String {
        self.model.network().name().to_string()
    }

    #[getter]
    fn genes(&self) -> Vec<String> {
        self.model.network().genes().iter().map(|g| g.name.clone()).collect()
    }

    #[getter]
    fn max_levels(&self) -> Vec<u32> {
        let net = self.model.network();
        (0..net.gene_count()).map(|g| net.max_level(g)).collect()
    }

    #[getter]
    fn initial(&self) -> Vec<u32> {
        levels(self.model.network().initial())
    }

    /// `(gene, next_state)` pairs for each enabled unit step.
    fn successors(&self, state: Vec<u32>) -> PyResult<Vec<(String, Vec<u32>)>> {
        let s = self::state(&self.model, state).map_err(PyValueError::new_err)?;
        let net = self.model.network();
        Ok(net
            .successors(&s)
            .iter()
            .map(|(g, t)| (net.genes()[*g].name.clone(), levels(t)))
            .collect())
    }

    fn is_stable(&self, state: Vec<u32>) -> PyResult<bool> {
        let s = self::state(&self.model, state).map_err(PyValueError::new_err)?;
        Ok(self.model.network().is_stable(&s))
    }

    /// The compiled place/transition net as `"json"` or `"dot"` text.
    #[pyo3(signature = (format = "json"))]
    fn compile(&self, format: &str) -> PyResult<String> {
        match format {
            "json" => Ok(to_json(self.model.petri_net())),
            "dot" => Ok(to_dot(self.model.petri_net())),
            other => Err(PyValueError::new_err(format!("unknown format {other:?}"))),
        }
    }

    fn count_reachable(&self) -> PyResult<num_bigint::BigUint> {
        checker(&self.model)
            .count_reachable()
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }

    /// Checks a CTL formula at the initial state. The result has keys
    /// `holds`, `reachable_count`, `satisfying_reachable_count` and
    /// `evidence` (a list of states, or `None`).
    fn check<'py>(&self, py: Python<'py>, formula: &str) -> PyResult<Bound<'py, PyDict>> {
        let v = check(&self.model, formula).map_err(to_py_err)?;
        let d = PyDict::new(py);
        d.set_item("holds", v.holds)?;
        d.set_item("reachable_count", v.reachable_count)?;
        d.set_item("satisfying_reachable_count", v.satisfying_reachable_count)?;
        d.set_item("evidence", v.evidence.map(|p| p.iter().map(levels).collect::<Vec<_>>()))?;
        Ok(d)
    }

    /// `(count, states)` of the stable states satisfying `where`, if given.
    #[pyo3(signature = (r#where = None))]
    fn stable(&self, r#where: Option<&str>) -> PyResult<(num_bigint::BigUint, Vec<Vec<u32>>)> {
        let r = stable(&self.model, r#where).map_err(to_py_err)?;
        Ok((r.count, r.states.iter().map(levels).collect()))
    }

    fn __repr__(&self) -> String {
        let net = self.model.network();
        format!("<Network {} with {} genes>", net.name(), net.gene_count())
    }
}

fn to_py_err(msg: String) -> PyErr {
    if msg.starts_with("query:") {
        PyValueError::new_err(msg)
    } else {
        PyRuntimeError::new_err(msg)
    }
}

#[pymodule]
fn pyregnet(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Network>()?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOGGLE: &str = include_str!("../../core/fixtures/toggle.grn");

    fn toggle() -> Model {
        Model::new(load_network(TOGGLE).unwrap().0)
    }

    #[test]
    fn check_and_stable() {
        let m = toggle();
        let v = check(&m, "EF (a = 1 and b = 0)").unwrap();
        assert!(v.holds);
        assert_eq!(v.evidence.unwrap(), vec![State::new(vec![0, 0]), State::new(vec![1, 0])]);
        let r = stable(&m, None).unwrap();
        assert_eq!(r.states, vec![State::new(vec![0, 1]), State::new(vec![1, 0])]);
        assert_eq!(stable(&m, Some("a = 1")).unwrap().states.len(), 1);
    }

    #[test]
    fn bad_input() {
        let m = toggle();
        assert!(check(&m, "EF (a = 1").unwrap_err().starts_with("query:1:"));
        assert!(check(&m, "EF z = 1").unwrap_err().contains("E002"));
        assert!(state(&m, vec![2, 0]).is_err());
        assert!(state(&m, vec![0]).is_err());
        assert!(!validate("network X\ngene a levels 0..1\n").is_empty());
    }
}
