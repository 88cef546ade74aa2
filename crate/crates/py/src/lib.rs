//! Python bindings: grammars, predict tables and both parsers.
//!
//! Values cross into Python as plain data: strings, ints, bools and `None`
//! map to themselves, lists and `Cons`/`Nil` chains to lists, tuples to
//! tuples, and other terms to `{"ctor": name, "args": [...]}` dicts.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList, PyTuple};

use xmlgram::analysis::PredictTable;
use xmlgram::ast::Grammar;
use xmlgram::engine;
use xmlgram::frontend::{parse_grammar, pretty_grammar};
use xmlgram::normalize::normalize_grammar;
use xmlgram::oracle::{Oracle, OracleConfig};
use xmlgram::sax::{read_events, SaxReader};
use xmlgram::value::Value;
use xmlgram::wellformed::check_grammar;
use xmlgram::xml::build_trees;

fn value_error(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_python<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    if let Some(items) = v.as_sequence() {
        let items = items.iter().map(|i| to_python(py, i)).collect::<PyResult<Vec<_>>>()?;
        return Ok(PyList::new(py, items)?.into_any());
    }
    Ok(match v {
        Value::Str(s) => s.as_ref().into_pyobject(py)?.into_any(),
        Value::Int(i) => i.into_pyobject(py)?.into_any(),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Null => py.None().into_bound(py),
        Value::Tuple(items) => {
            let items = items.iter().map(|i| to_python(py, i)).collect::<PyResult<Vec<_>>>()?;
            PyTuple::new(py, items)?.into_any()
        }
        Value::Term(ctor, args) => {
            let dict = PyDict::new(py);
            dict.set_item("ctor", ctor.as_ref())?;
            let args = args.iter().map(|a| to_python(py, a)).collect::<PyResult<Vec<_>>>()?;
            dict.set_item("args", PyList::new(py, args)?)?;
            dict.into_any()
        }
        Value::List(_) => unreachable!("lists are sequences"),
    })
}

/// A parsed grammar.
#[pyclass(name = "Grammar", module = "xmlgram", frozen)]
struct PyGrammar {
    inner: Grammar,
}

#[pymethods]
impl PyGrammar {
    /// Parses grammar source; raises `ValueError` listing every diagnostic.
    #[staticmethod]
    fn parse(source: &str) -> PyResult<Self> {
        let inner = parse_grammar(source).map_err(|diags| {
            value_error(diags.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n"))
        })?;
        Ok(PyGrammar { inner })
    }

    #[getter]
    fn name(&self) -> &str {
        &self.inner.name
    }

    /// Rule names in order of first definition.
    #[getter]
    fn rules(&self) -> Vec<String> {
        self.inner.clause_names().into_iter().map(String::from).collect()
    }

    /// Well-formedness errors, empty when the grammar is well formed.
    fn check(&self) -> Vec<String> {
        check_grammar(&self.inner).iter().map(ToString::to_string).collect()
    }

    fn normalize(&self) -> PyGrammar {
        PyGrammar { inner: normalize_grammar(&self.inner) }
    }

    /// Predict table of the normalized grammar for `start` (default: the
    /// first rule).
    #[pyo3(signature = (start = None))]
    fn table(&self, start: Option<&str>) -> PyResult<PyTable> {
        let start = start.or(self.inner.first_clause()).ok_or_else(|| value_error("grammar has no rules"))?;
        let inner = PredictTable::build(normalize_grammar(&self.inner), start).map_err(value_error)?;
        Ok(PyTable { inner })
    }

    /// Every distinct value the reference interpreter derives for the
    /// document.
    #[pyo3(signature = (xml, start = None, max_derivations = None, keep_whitespace = false))]
    fn oracle_parse<'py>(
        &self,
        py: Python<'py>,
        xml: &str,
        start: Option<&str>,
        max_derivations: Option<usize>,
        keep_whitespace: bool,
    ) -> PyResult<Vec<Bound<'py, PyAny>>> {
        let start = start.or(self.inner.first_clause()).ok_or_else(|| value_error("grammar has no rules"))?;
        let events = read_events(xml.as_bytes(), keep_whitespace).map_err(value_error)?;
        let trees = build_trees(events).map_err(value_error)?;
        let mut config = OracleConfig::default();
        if let Some(n) = max_derivations {
            config.max_derivations = n;
        }
        let acceptance = Oracle::with_config(&self.inner, config)
            .accepts_forest(start, &[], &trees)
            .map_err(value_error)?;
        acceptance.values.iter().map(|v| to_python(py, v)).collect()
    }

    fn __str__(&self) -> String {
        pretty_grammar(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("<Grammar {} with {} rules>", self.inner.name, self.inner.clause_names().len())
    }
}

/// A predict table bound to its start rule.
#[pyclass(name = "Table", module = "xmlgram", frozen)]
struct PyTable {
    inner: PredictTable,
}

#[pymethods]
impl PyTable {
    #[getter]
    fn start(&self) -> &str {
        self.inner.start()
    }

    #[getter]
    fn is_ll1(&self) -> bool {
        self.inner.is_ll1()
    }

    #[getter]
    fn conflicts(&self) -> Vec<String> {
        self.inner.conflicts().iter().map(ToString::to_string).collect()
    }

    /// `(rule, token, definition index)` for every nonempty cell.
    fn cells(&self) -> Vec<(String, String, usize)> {
        self.inner.cells().map(|(r, t, i)| (r.to_string(), t.to_string(), i)).collect()
    }

    fn render_kv(&self) -> String {
        self.inner.render_kv()
    }

    fn render_text(&self) -> String {
        self.inner.render_text()
    }

    /// Runs the predictive engine over the document; raises `ValueError`
    /// with the failure reason and event position.
    #[pyo3(signature = (xml, keep_whitespace = false))]
    fn parse<'py>(&self, py: Python<'py>, xml: &str, keep_whitespace: bool) -> PyResult<Bound<'py, PyAny>> {
        if !self.inner.is_ll1() {
            return Err(value_error("grammar is not LL(1)"));
        }
        let reader = SaxReader::from_text(xml).keep_whitespace(keep_whitespace);
        let value = engine::run(&self.inner, self.inner.start(), &[], reader).map_err(value_error)?;
        to_python(py, &value)
    }
}

/// Parses `xml` with `grammar_source` starting at `start` (default: the
/// first rule) using the predictive engine.
#[pyfunction]
#[pyo3(signature = (grammar_source, xml, start = None))]
fn parse<'py>(py: Python<'py>, grammar_source: &str, xml: &str, start: Option<&str>) -> PyResult<Bound<'py, PyAny>> {
    let grammar = PyGrammar::parse(grammar_source)?;
    let errors = grammar.check();
    if !errors.is_empty() {
        return Err(value_error(errors.join("\n")));
    }
    grammar.table(start)?.parse(py, xml, false)
}

#[pymodule(name = "xmlgram")]
fn xmlgram_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrammar>()?;
    m.add_class::<PyTable>()?;
    m.add_function(wrap_pyfunction!(parse, m)?)?;
    Ok(())
}
