//! Python bindings. Reports cross the boundary as JSON and are decoded with
//! the `json` module, so they match the command-line reports field for field.

use std::sync::Arc;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use ordlab::conesearch::{certify_nonorderable, search, ConeConstraint, SearchOptions, SearchOutcome};
use ordlab::detection::{regular_detect_check, slope_of_order, weak_detect};
use ordlab::gluing::{transport_slope, GluingMap};
use ordlab::lattice::Slope;
use ordlab::orders::{named_order, order_names};
use ordlab::{parse_presentation, GroupBackend, PeripheralSubgroup};

fn py_err(e: ordlab::Error) -> PyErr {
    match e {
        ordlab::Error::Syntax { .. }
        | ordlab::Error::UndeclaredGenerator(_)
        | ordlab::Error::DuplicateGenerator(_)
        | ordlab::Error::Invalid(_)
        | ordlab::Error::Unsupported(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn decode<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (v.to_string(),))
}

fn slope(text: &str) -> PyResult<Slope> {
    text.parse().map_err(py_err)
}

#[pyclass(frozen, module = "ordlab_py")]
struct Group {
    inner: Arc<GroupBackend>,
}

impl Group {
    fn peripheral(&self, name: &str) -> PyResult<PeripheralSubgroup> {
        self.inner
            .peripheral(name)
            .cloned()
            .ok_or_else(|| PyValueError::new_err(format!("no peripheral subgroup `{name}`")))
    }

    fn wrap(g: GroupBackend) -> Self {
        Group { inner: Arc::new(g) }
    }
}

#[pymethods]
impl Group {
    /// Parses `gens ...; rel ...; peripheral T = mu, lambda;`.
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        let p = parse_presentation(text).map_err(py_err)?;
        Ok(Self::wrap(GroupBackend::from_presentation(p).map_err(py_err)?))
    }

    #[staticmethod]
    fn klein_bottle() -> Self {
        Self::wrap(GroupBackend::klein_bottle())
    }

    #[staticmethod]
    fn trefoil() -> Self {
        Self::wrap(GroupBackend::trefoil())
    }

    #[staticmethod]
    fn zn(n: usize) -> Self {
        Self::wrap(GroupBackend::zn(n))
    }

    #[getter]
    fn family(&self) -> String {
        self.inner.family.tag()
    }

    #[getter]
    fn generators(&self) -> Vec<String> {
        self.inner.presentation.generators.clone()
    }

    fn order_names(&self) -> Vec<String> {
        order_names(&self.inner)
    }

    /// Sizes of `B_0, ..., B_radius`.
    fn ball_sizes(&self, radius: usize) -> PyResult<Vec<usize>> {
        let b = self.inner.ball(radius).map_err(py_err)?;
        Ok((0..=radius).map(|r| b.within(r).len()).collect())
    }

    /// Normal form of a word, or an error when the word problem is out of reach.
    fn normal_form(&self, word: &str) -> PyResult<String> {
        let w = self.inner.parse_word(word).map_err(py_err)?;
        Ok(self.inner.format(&self.inner.normal_form(&w).map_err(py_err)?))
    }

    /// Sign of a nontrivial `word` under a named order, `"+"` or `"-"`.
    fn sign(&self, order: &str, word: &str) -> PyResult<char> {
        let o = named_order(self.inner.clone(), order).map_err(py_err)?;
        let w = self.inner.parse_word(word).map_err(py_err)?;
        Ok(o.sign_of(&w).map_err(py_err)?.as_char())
    }

    #[pyo3(signature = (order, peripheral = "T", radius = 4))]
    fn slope<'py>(&self, py: Python<'py>, order: &str, peripheral: &str, radius: usize) -> PyResult<Bound<'py, PyAny>> {
        let o = named_order(self.inner.clone(), order).map_err(py_err)?;
        let e = slope_of_order(&o, &self.peripheral(peripheral)?, radius).map_err(py_err)?;
        let mut v = serde_json::to_value(&e).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        v["display"] = e.to_string().into();
        decode(py, &v)
    }

    /// Weak or regular detection of `slope` by a named order.
    #[allow(clippy::too_many_arguments)]
    #[pyo3(signature = (slope_text, order, level = "weak", peripheral = "T", radius = 3, r_conj = 3))]
    fn detect<'py>(
        &self,
        py: Python<'py>,
        slope_text: &str,
        order: &str,
        level: &str,
        peripheral: &str,
        radius: usize,
        r_conj: usize,
    ) -> PyResult<Bound<'py, PyAny>> {
        let o = named_order(self.inner.clone(), order).map_err(py_err)?;
        let p = self.peripheral(peripheral)?;
        let s = slope(slope_text)?;
        let v = match level {
            "weak" => weak_detect(&o, &p, &s, radius),
            "regular" => regular_detect_check(&o, &p, &s, r_conj, radius),
            other => return Err(PyValueError::new_err(format!("unknown level `{other}`"))),
        }
        .map_err(py_err)?;
        decode(py, &v.to_json())
    }

    /// Number of positive-cone snapshots on `B_radius` with the given
    /// peripheral line constraints, as `(count, complete)`.
    #[pyo3(signature = (radius, lines = Vec::new(), limit = 10_000))]
    fn count_cones(&self, radius: usize, lines: Vec<(String, String)>, limit: usize) -> PyResult<(usize, bool)> {
        let mut cs = Vec::new();
        for (peripheral, s) in lines {
            cs.push(ConeConstraint::PeripheralLine {
                peripheral,
                slope: slope(&s)?,
                side: None,
            });
        }
        let opts = SearchOptions {
            limit,
            ..SearchOptions::default()
        };
        match search(&self.inner, radius, &cs, &opts).map_err(py_err)? {
            SearchOutcome::Enumeration { snapshots, complete } => Ok((snapshots.len(), complete)),
            SearchOutcome::Unsat(_) => Ok((0, true)),
        }
    }

    /// Radius of a non-orderability certificate, if one is found up to `max_radius`.
    #[pyo3(signature = (max_radius = 3))]
    fn certify_nonorderable(&self, max_radius: usize) -> PyResult<Option<usize>> {
        let c = certify_nonorderable(&self.inner, max_radius, &SearchOptions::default()).map_err(py_err)?;
        Ok(c.map(|c| c.radius))
    }

    fn __repr__(&self) -> String {
        format!(
            "Group({}, generators={:?})",
            self.inner.family.tag(),
            self.inner.presentation.generators
        )
    }
}

/// Image of a slope under a unimodular gluing matrix.
#[pyfunction]
fn transport(matrix: [[i64; 2]; 2], slope_text: &str) -> PyResult<String> {
    let f = GluingMap::new("T", "T", matrix).map_err(py_err)?;
    Ok(transport_slope(&f, &slope(slope_text)?).to_string())
}

#[pymodule]
fn ordlab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Group>()?;
    m.add_function(wrap_pyfunction!(transport, m)?)?;
    Ok(())
}
