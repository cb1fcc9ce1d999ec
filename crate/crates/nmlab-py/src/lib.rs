//! Python bindings: the main domain types and operations, with text
//! formats shared with the command-line tool.  Set-valued arguments
//! and results cross the boundary as sorted lists of strings; errors
//! surface as `ValueError` carrying the library's error message.

use std::collections::BTreeSet;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use nmlab::choice::{check, check_size_rule, ElemSet, Property, SizeRule};
use nmlab::higher;
use nmlab::infer::{self, Mode, Verdict};
use nmlab::io;
use nmlab::net::NodeId;
use nmlab::pref;
use nmlab::reactive;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_mode(mode: &str) -> PyResult<Mode> {
    Ok(match mode {
        "split" => Mode::OffPathSplit,
        "onpath" => Mode::OnPath,
        "total" => Mode::TotalValidity,
        "extensions" => Mode::Extensions,
        _ => return Err(value_error(format!("unknown mode {mode:?}"))),
    })
}

fn verdict_sign(v: Verdict) -> &'static str {
    match v {
        Verdict::Positive => "+",
        Verdict::Negative => "-",
        Verdict::Undefined => "?",
    }
}

fn elem_set(items: Vec<String>) -> ElemSet {
    items.into_iter().collect()
}

fn sorted_vec(s: &ElemSet) -> Vec<String> {
    s.iter().cloned().collect()
}

/// A finite acyclic inheritance diagram with signed arrows.
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct Diagram {
    inner: nmlab::net::Diagram,
}

#[pymethods]
impl Diagram {
    /// Build from `"a -> b"` / `"a !> b"` arrow strings.
    #[new]
    fn new(arrows: Vec<String>) -> PyResult<Diagram> {
        let text = arrows.join("\n");
        Diagram::parse(&text)
    }

    /// Parse the diagram text format.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Diagram> {
        Ok(Diagram { inner: io::parse_diagram(text).map_err(value_error)? })
    }

    fn nodes(&self) -> Vec<String> {
        self.inner.nodes().map(|n| n.to_string()).collect()
    }

    fn arrows(&self) -> Vec<String> {
        self.inner.arrows().map(|a| a.to_string()).collect()
    }

    /// Conclusion sign for the node pair: "+", "-", or "?".
    #[pyo3(signature = (x, y, mode = "split"))]
    fn conclude(&self, x: &str, y: &str, mode: &str) -> PyResult<String> {
        let v = infer::conclude(&self.inner, &NodeId::new(x), &NodeId::new(y), parse_mode(mode)?)
            .map_err(value_error)?;
        Ok(verdict_sign(v).to_string())
    }

    #[pyo3(signature = (mode = "split"))]
    fn valid_paths(&self, mode: &str) -> PyResult<Vec<String>> {
        let vs = infer::valid_paths(&self.inner, parse_mode(mode)?).map_err(value_error)?;
        Ok(vs.paths().map(|p| p.to_string()).collect())
    }

    /// The valid-path sets of the branching semantics, one list per
    /// extension.
    fn extensions(&self) -> Vec<Vec<String>> {
        infer::extensions(&self.inner)
            .iter()
            .map(|vs| vs.paths().map(|p| p.to_string()).collect())
            .collect()
    }

    /// All decided node pairs as `(x, y, sign)` triples.
    fn conclusions(&self) -> Vec<(String, String, String)> {
        infer::bigset_conclusions(&self.inner)
            .into_iter()
            .map(|(x, y, p)| (x.to_string(), y.to_string(), verdict_sign(p.into()).to_string()))
            .collect()
    }

    /// Arrows marking dead ends on the way from `x` to `y`.
    fn signposts(&self, x: &str, y: &str) -> PyResult<Vec<String>> {
        let arrows = reactive::signposts(&self.inner, &NodeId::new(x), &NodeId::new(y))
            .map_err(value_error)?;
        Ok(arrows.iter().map(|a| a.to_string()).collect())
    }

    /// Compile into a reactive diagram for one origin.
    fn compile(&self, origin: &str) -> PyResult<ReactiveDiagram> {
        Ok(ReactiveDiagram {
            inner: reactive::compile(&self.inner, &NodeId::new(origin)).map_err(value_error)?,
        })
    }

    /// Visible set of the seed nodes under blocking semantics.
    fn horizon(&self, seeds: Vec<String>) -> PyResult<Vec<String>> {
        let seeds: BTreeSet<NodeId> = seeds.iter().map(|s| NodeId::new(s.as_str())).collect();
        let h = nmlab::blocking::horizon(&self.inner, &seeds).map_err(value_error)?;
        Ok(h.visible().iter().map(|n| n.to_string()).collect())
    }

    fn to_text(&self) -> String {
        io::serialize_diagram(&self.inner)
    }

    fn to_dot(&self) -> String {
        io::export_dot(&io::DotObject::Diagram(self.inner.clone()))
    }

    fn __repr__(&self) -> String {
        format!("Diagram({} nodes, {} arrows)", self.inner.nodes().count(), self.inner.arrows().count())
    }
}

/// A diagram compiled for one origin: base plus double arrows.
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct ReactiveDiagram {
    inner: reactive::ReactiveDiagram,
}

#[pymethods]
impl ReactiveDiagram {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<ReactiveDiagram> {
        Ok(ReactiveDiagram { inner: io::parse_reactive(text).map_err(value_error)? })
    }

    fn origin(&self) -> String {
        self.inner.origin().to_string()
    }

    fn doubles(&self) -> Vec<String> {
        self.inner.doubles().map(|d| d.to_string()).collect()
    }

    /// Naive traversal: the valid paths from the origin.
    fn traverse(&self) -> Vec<String> {
        self.inner.traverse().iter().map(|p| p.to_string()).collect()
    }

    fn to_text(&self) -> String {
        io::serialize_reactive(&self.inner)
    }

    fn to_dot(&self) -> String {
        io::export_dot(&io::DotObject::Reactive(self.inner.clone()))
    }
}

/// A choice function over subsets of a finite universe.
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct ChoiceFunction {
    inner: nmlab::choice::ChoiceFunction,
}

#[pymethods]
impl ChoiceFunction {
    /// Build from the universe and `(domain set, chosen set)` pairs.
    #[new]
    fn new(universe: Vec<String>, mu: Vec<(Vec<String>, Vec<String>)>) -> PyResult<ChoiceFunction> {
        let values = mu.into_iter().map(|(x, y)| (elem_set(x), elem_set(y))).collect();
        Ok(ChoiceFunction {
            inner: nmlab::choice::ChoiceFunction::new(elem_set(universe), values)
                .map_err(value_error)?,
        })
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<ChoiceFunction> {
        Ok(ChoiceFunction { inner: io::parse_function(text).map_err(value_error)? })
    }

    fn universe(&self) -> Vec<String> {
        sorted_vec(self.inner.universe())
    }

    fn domain(&self) -> Vec<Vec<String>> {
        self.inner.domain().map(sorted_vec).collect()
    }

    fn mu(&self, x: Vec<String>) -> PyResult<Vec<String>> {
        match self.inner.mu(&elem_set(x)) {
            Some(y) => Ok(sorted_vec(y)),
            None => Err(value_error("set outside the domain")),
        }
    }

    /// Check a property token; returns `(holds, witness-or-None)`.
    fn check(&self, property: &str) -> PyResult<(bool, Option<String>)> {
        let p: Property = property.parse().map_err(value_error)?;
        let r = check(&self.inner, &p).map_err(value_error)?;
        Ok((r.holds, r.witness.map(|w| w.to_string())))
    }

    /// Build a representing preferential structure of the given kind
    /// (general, transitive, smooth, smooth-transitive, or ranked).
    fn represent(&self, kind: &str) -> PyResult<PrefStructure> {
        let built = match kind {
            "general" => pref::represent_general(&self.inner),
            "transitive" => pref::represent_transitive(&self.inner),
            "smooth" => pref::represent_smooth(&self.inner),
            "smooth-transitive" => pref::represent_smooth_transitive(&self.inner),
            "ranked" => pref::represent_ranked(&self.inner),
            _ => return Err(value_error(format!("unknown representation kind {kind:?}"))),
        };
        Ok(PrefStructure { inner: built.map_err(value_error)? })
    }

    /// Level-2 attacking representation (any choice with chosen
    /// elements inside their sets).
    fn represent_attacking(&self) -> GenStructure {
        let pair = higher::AttackPair::from_choice(&self.inner);
        GenStructure { inner: higher::represent_attacking(&pair) }
    }

    /// Level-3 essentially smooth representation.
    fn represent_level3(&self) -> PyResult<GenStructure> {
        Ok(GenStructure { inner: higher::represent_level3(&self.inner).map_err(value_error)? })
    }

    fn to_text(&self) -> String {
        io::serialize_function(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("ChoiceFunction(|U|={}, |domain|={})", self.inner.universe().len(), self.inner.domain_len())
    }
}

/// A preferential structure: element copies with a strict preference
/// relation.
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct PrefStructure {
    inner: pref::PrefStructure,
}

#[pymethods]
impl PrefStructure {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<PrefStructure> {
        Ok(PrefStructure { inner: io::parse_pref(text).map_err(value_error)? })
    }

    fn nodes(&self) -> Vec<String> {
        self.inner.nodes().iter().map(|n| n.to_string()).collect()
    }

    fn mu(&self, x: Vec<String>) -> Vec<String> {
        sorted_vec(&self.inner.mu(&elem_set(x)))
    }

    /// Does the structure's choice coincide with `f` on its domain?
    fn verify(&self, f: &ChoiceFunction) -> (bool, Option<String>) {
        let r = pref::verify(&self.inner, &f.inner);
        (r.holds, r.witness.map(|w| w.to_string()))
    }

    fn is_transitive(&self) -> bool {
        self.inner.is_transitive().holds
    }

    fn is_smooth(&self, domain: Vec<Vec<String>>) -> bool {
        let domain: Vec<ElemSet> = domain.into_iter().map(elem_set).collect();
        self.inner.is_smooth(&domain).holds
    }

    fn is_ranked(&self) -> bool {
        self.inner.is_ranked().holds
    }

    fn to_text(&self) -> String {
        io::serialize_pref(&self.inner)
    }

    fn to_dot(&self) -> String {
        io::export_dot(&io::DotObject::Pref(self.inner.clone()))
    }
}

/// A higher structure: copies plus attack arrows that may target other
/// arrows.
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct GenStructure {
    inner: higher::GenStructure,
}

#[pymethods]
impl GenStructure {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<GenStructure> {
        Ok(GenStructure { inner: io::parse_gen(text).map_err(value_error)? })
    }

    fn level(&self) -> usize {
        self.inner.level()
    }

    fn nodes(&self) -> Vec<String> {
        self.inner.nodes().iter().map(|n| n.to_string()).collect()
    }

    fn arrow_ids(&self) -> Vec<String> {
        self.inner.arrows().map(|a| a.id.clone()).collect()
    }

    fn mu(&self, x: Vec<String>) -> Vec<String> {
        sorted_vec(&self.inner.higher_mu(&elem_set(x)))
    }

    /// Arrow ids valid within `x` (origins and destinations in `x`).
    fn valid_arrows(&self, x: Vec<String>) -> Vec<String> {
        let x = elem_set(x);
        self.inner.valid_within(&x, &x).into_iter().collect()
    }

    fn essentially_smooth(&self, domain: Vec<Vec<String>>) -> bool {
        let domain: Vec<ElemSet> = domain.into_iter().map(elem_set).collect();
        higher::essentially_smooth(&self.inner, &domain).holds
    }

    fn totally_smooth(&self, domain: Vec<Vec<String>>) -> bool {
        let domain: Vec<ElemSet> = domain.into_iter().map(elem_set).collect();
        higher::totally_smooth(&self.inner, &domain).holds
    }

    fn to_text(&self) -> String {
        io::serialize_gen(&self.inner)
    }

    fn to_dot(&self) -> String {
        io::export_dot(&io::DotObject::Gen(self.inner.clone()))
    }
}

/// A size system: per reference set, the ideal of its small subsets.
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct SizeSystem {
    inner: nmlab::choice::SizeSystem,
}

#[pymethods]
impl SizeSystem {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<SizeSystem> {
        Ok(SizeSystem { inner: io::parse_system(text).map_err(value_error)? })
    }

    /// Check a size-rule token; returns `(holds, witness-or-None)`.
    fn check(&self, rule: &str) -> PyResult<(bool, Option<String>)> {
        let r: SizeRule = rule.parse().map_err(value_error)?;
        let result = check_size_rule(&self.inner, &r).map_err(value_error)?;
        Ok((result.holds, result.witness.map(|w| w.to_string())))
    }

    fn to_text(&self) -> String {
        io::serialize_system(&self.inner)
    }
}

/// Parse a gate circuit and run it, returning the transition table as
/// rows of booleans (one per time slice, in declaration order).
#[pyfunction]
fn simulate_circuit(text: &str, steps: usize) -> PyResult<Vec<Vec<bool>>> {
    let c = io::parse_circuit(text).map_err(value_error)?;
    reactive::simulate_circuit(&c, steps).map_err(value_error)
}

/// Render a circuit's transition table with aligned T/F columns.
#[pyfunction]
fn circuit_table(text: &str, steps: usize) -> PyResult<String> {
    let c = io::parse_circuit(text).map_err(value_error)?;
    let table = reactive::simulate_circuit(&c, steps).map_err(value_error)?;
    Ok(io::format_table(&c, &table))
}

/// Search for a choice function satisfying every hypothesis token but
/// violating the conclusion; returns `(function-text, witness)` or
/// `None` when the bounded search is exhausted.
#[pyfunction]
#[pyo3(signature = (hypothesis, conclusion, bound = 3, seed = 0))]
fn search_counterexample(
    hypothesis: Vec<String>,
    conclusion: &str,
    bound: usize,
    seed: u64,
) -> PyResult<Option<(String, String)>> {
    let mut hyps = Vec::new();
    for h in &hypothesis {
        hyps.push(h.parse::<Property>().map_err(value_error)?);
    }
    let conclusion: Property = conclusion.parse().map_err(value_error)?;
    let config = nmlab::choice::SearchConfig {
        max_universe: bound.max(1),
        seed,
        ..Default::default()
    };
    match nmlab::choice::search_counterexample(&hyps, &conclusion, &config).map_err(value_error)? {
        nmlab::choice::SearchOutcome::CounterExample { function, witness } => {
            Ok(Some((io::serialize_function(&function), witness.to_string())))
        }
        nmlab::choice::SearchOutcome::Exhausted { .. } => Ok(None),
    }
}

#[pymodule]
fn nmlab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Diagram>()?;
    m.add_class::<ReactiveDiagram>()?;
    m.add_class::<ChoiceFunction>()?;
    m.add_class::<PrefStructure>()?;
    m.add_class::<GenStructure>()?;
    m.add_class::<SizeSystem>()?;
    m.add_function(wrap_pyfunction!(simulate_circuit, m)?)?;
    m.add_function(wrap_pyfunction!(circuit_table, m)?)?;
    m.add_function(wrap_pyfunction!(search_counterexample, m)?)?;
    Ok(())
}
