//! Text formats, DOT export, and the command front door.
//!
//! Every domain object has a line-oriented text format: diagrams as
//! arrow lines, reactive diagrams as a base plus double-arrow lines,
//! circuits as gate equations, choice functions and size systems as
//! set mappings, preferential and higher structures as copy/relation
//! listings.  Parsing reports syntax errors with line and column;
//! semantic validation is delegated to the owning module and surfaces
//! as that module's error.  Serialization canonicalizes whitespace and
//! ordering, so `serialize(parse(t))` is a fixpoint on well-formed
//! input.  [`run`] executes a [`Command`] and encodes the outcome in a
//! process exit status: 0 for success, 1 for a violated property or a
//! refused construction (with the witness printed), 2 for input errors.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::blocking::{horizon, BlockNet};
use crate::choice::{
    check, check_size_rule, search_counterexample, ChoiceError, ChoiceFunction, Elem, ElemSet,
    Property, SearchConfig, SearchOutcome, SizeRule, SizeSystem,
};
use crate::higher::{GenStructure, HigherArrow, HigherError, Target};
use crate::infer::{conclude, InferError, Mode, Verdict};
use crate::net::{Arrow, Diagram, NetError, NodeId, Polarity};
use crate::pref::{
    represent_general, represent_layer_ranked, represent_ranked, represent_smooth,
    represent_smooth_transitive, represent_transitive, verify, CopyNode, PrefError, PrefStructure,
    RankedPartition,
};
use crate::reactive::{
    compile, DoubleArrow, Gate, GateCircuit, GateExpr, ReactiveDiagram, ReactiveError,
};

/// A syntax error at a text position (both 1-based).
#[derive(Error, Clone, PartialEq, Eq, Debug)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> IoError {
    IoError::Syntax(ParseError { line, column, message: message.into() })
}

/// Any error surfaced by the text interface: a syntax error with a
/// position, or a semantic error from the owning module.
#[derive(Error, Debug, PartialEq, Eq)]
pub enum IoError {
    #[error(transparent)]
    Syntax(#[from] ParseError),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Reactive(#[from] ReactiveError),
    #[error(transparent)]
    Infer(#[from] InferError),
    #[error(transparent)]
    Choice(#[from] ChoiceError),
    #[error(transparent)]
    Pref(#[from] PrefError),
    #[error(transparent)]
    Higher(#[from] HigherError),
    #[error("{0}")]
    Unsupported(String),
}

/// Meaningful lines of a text: (1-based line number, trimmed content),
/// with blank lines and full-line `#` comments removed.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn column_of(line: &str, part: &str) -> usize {
    line.find(part).map_or(1, |i| i + 1)
}

// ---------------------------------------------------------------------
// Diagrams
// ---------------------------------------------------------------------

/// One `a -> b` / `a !> b` item; `ln` is the line number for errors.
fn parse_arrow_item(ln: usize, col: usize, item: &str) -> Result<Arrow, IoError> {
    let (split, polarity) = if let Some(p) = item.split_once("!>") {
        (p, Polarity::Negative)
    } else if let Some(p) = item.split_once("->") {
        (p, Polarity::Positive)
    } else {
        return Err(syntax(ln, col, format!("expected an arrow, got {item:?}")));
    };
    let (l, r) = (split.0.trim(), split.1.trim());
    for (side, name) in [("source", l), ("target", r)] {
        if name.is_empty() || name.split_whitespace().count() != 1 {
            return Err(syntax(ln, col, format!("bad arrow {side} in {item:?}")));
        }
    }
    Ok(Arrow {
        source: NodeId::new(l),
        target: NodeId::new(r),
        polarity,
    })
}

/// Parse the diagram format: optional `node <name>` declarations,
/// `a -> b` and `a !> b` arrows, `#` comments.
pub fn parse_diagram(text: &str) -> Result<Diagram, IoError> {
    let mut nodes: BTreeSet<NodeId> = BTreeSet::new();
    let mut arrows: Vec<Arrow> = Vec::new();
    for (ln, line) in lines(text) {
        if let Some(rest) = line.strip_prefix("node ") {
            let name = rest.trim();
            if name.is_empty() || name.split_whitespace().count() != 1 {
                return Err(syntax(ln, column_of(line, rest), "expected one node name"));
            }
            nodes.insert(NodeId::new(name));
        } else {
            let a = parse_arrow_item(ln, 1, line)?;
            nodes.insert(a.source.clone());
            nodes.insert(a.target.clone());
            arrows.push(a);
        }
    }
    Ok(Diagram::new(nodes, arrows)?)
}

/// Canonical diagram text: `node` lines for isolated nodes, then the
/// arrows in canonical order.
pub fn serialize_diagram(d: &Diagram) -> String {
    let mut out = String::new();
    for n in d.nodes() {
        if d.in_arrows(n).next().is_none() && d.out_arrows(n).next().is_none() {
            writeln!(out, "node {n}").unwrap();
        }
    }
    for a in d.arrows() {
        writeln!(out, "{a}").unwrap();
    }
    out
}

// ---------------------------------------------------------------------
// Reactive diagrams
// ---------------------------------------------------------------------

/// Parse a reactive diagram: an `origin <node>` line, diagram lines,
/// and `(a -> b) ~> (c -> d)` double-arrow lines.
pub fn parse_reactive(text: &str) -> Result<ReactiveDiagram, IoError> {
    let mut origin: Option<NodeId> = None;
    let mut base = String::new();
    let mut doubles: Vec<DoubleArrow> = Vec::new();
    for (ln, line) in lines(text) {
        if let Some(rest) = line.strip_prefix("origin ") {
            let name = rest.trim();
            if origin.replace(NodeId::new(name)).is_some() {
                return Err(syntax(ln, 1, "duplicate origin line"));
            }
        } else if let Some(rest) = line.strip_prefix('(') {
            let Some((trigger, tail)) = rest.split_once(')') else {
                return Err(syntax(ln, 1, "unterminated double-arrow trigger"));
            };
            let tail = tail.trim_start();
            let Some(blocked) = tail
                .strip_prefix("~>")
                .map(str::trim_start)
                .and_then(|t| t.strip_prefix('('))
                .and_then(|t| t.strip_suffix(')'))
            else {
                return Err(syntax(ln, column_of(line, tail), "expected `~> (<arrow>)`"));
            };
            doubles.push(DoubleArrow {
                trigger: parse_arrow_item(ln, column_of(line, trigger), trigger)?,
                blocked: parse_arrow_item(ln, column_of(line, blocked), blocked)?,
            });
        } else {
            base.push_str(line);
            base.push('\n');
        }
    }
    let Some(origin) = origin else {
        return Err(syntax(1, 1, "missing origin line"));
    };
    Ok(ReactiveDiagram::new(parse_diagram(&base)?, origin, doubles)?)
}

pub fn serialize_reactive(r: &ReactiveDiagram) -> String {
    let mut out = format!("origin {}\n", r.origin());
    out.push_str(&serialize_diagram(r.base()));
    for d in r.doubles() {
        writeln!(out, "{d}").unwrap();
    }
    out
}

// ---------------------------------------------------------------------
// Gate circuits
// ---------------------------------------------------------------------

struct ExprParser<'a> {
    ln: usize,
    line: &'a str,
    rest: &'a str,
}

impl<'a> ExprParser<'a> {
    fn col(&self) -> usize {
        self.line.len() - self.rest.len() + 1
    }

    fn skip_space(&mut self) {
        self.rest = self.rest.trim_start();
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_space();
        if let Some(r) = self.rest.strip_prefix(tok) {
            self.rest = r;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<&'a str, IoError> {
        self.skip_space();
        let end = self
            .rest
            .find(|c: char| !(c.is_alphanumeric() || c == '_'))
            .unwrap_or(self.rest.len());
        if end == 0 {
            return Err(syntax(self.ln, self.col(), "expected a point name"));
        }
        let (name, rest) = self.rest.split_at(end);
        self.rest = rest;
        Ok(name)
    }

    // Precedence: `!` binds tighter than `&`, which binds tighter
    // than `|`; parentheses group.
    fn or(&mut self) -> Result<GateExpr, IoError> {
        let mut e = self.and()?;
        while self.eat("|") {
            e = GateExpr::or(e, self.and()?);
        }
        Ok(e)
    }

    fn and(&mut self) -> Result<GateExpr, IoError> {
        let mut e = self.unary()?;
        while self.eat("&") {
            e = GateExpr::and(e, self.unary()?);
        }
        Ok(e)
    }

    fn unary(&mut self) -> Result<GateExpr, IoError> {
        if self.eat("!") {
            Ok(GateExpr::not(self.unary()?))
        } else if self.eat("(") {
            let e = self.or()?;
            if !self.eat(")") {
                return Err(syntax(self.ln, self.col(), "expected `)`"));
            }
            Ok(e)
        } else {
            Ok(GateExpr::point(self.ident()?))
        }
    }
}

fn parse_bool(ln: usize, col: usize, tok: &str) -> Result<bool, IoError> {
    match tok {
        "T" => Ok(true),
        "F" => Ok(false),
        _ => Err(syntax(ln, col, format!("expected T or F, got {tok:?}"))),
    }
}

/// Parse a circuit: `point <name> = T|F` initial values and
/// `<name> := <expr> @<delay>` gate equations.  Point order follows
/// first mention.
pub fn parse_circuit(text: &str) -> Result<GateCircuit, IoError> {
    let mut points: Vec<String> = Vec::new();
    let mut gates: BTreeMap<String, Gate> = BTreeMap::new();
    let mut initial: BTreeMap<String, bool> = BTreeMap::new();
    let mut declare = |name: &str| {
        if !points.iter().any(|p| p == name) {
            points.push(name.to_string());
        }
    };
    for (ln, line) in lines(text) {
        if let Some(rest) = line.strip_prefix("point ") {
            let Some((name, value)) = rest.split_once('=') else {
                return Err(syntax(ln, column_of(line, rest), "expected `point <name> = T|F`"));
            };
            let (name, value) = (name.trim(), value.trim());
            declare(name);
            initial.insert(name.to_string(), parse_bool(ln, column_of(line, value), value)?);
        } else if let Some((name, rhs)) = line.split_once(":=") {
            let name = name.trim();
            let Some((expr_text, delay)) = rhs.rsplit_once('@') else {
                return Err(syntax(ln, column_of(line, rhs), "expected `@<delay>` after the gate"));
            };
            let delay: usize = delay.trim().parse().map_err(|_| {
                syntax(ln, column_of(line, delay.trim()), "bad delay")
            })?;
            let mut p = ExprParser { ln, line, rest: expr_text };
            let expr = p.or()?;
            p.skip_space();
            if !p.rest.is_empty() {
                return Err(syntax(ln, p.col(), format!("trailing input {:?}", p.rest)));
            }
            declare(name);
            gates.insert(name.to_string(), Gate { expr, delay });
        } else {
            return Err(syntax(ln, 1, format!("unrecognized circuit line {line:?}")));
        }
    }
    for g in gates.values() {
        let mut used = BTreeSet::new();
        collect_points(&g.expr, &mut used);
        for p in used {
            declare(&p);
        }
    }
    Ok(GateCircuit::new(points, gates, initial)?)
}

fn collect_points(e: &GateExpr, out: &mut BTreeSet<String>) {
    match e {
        GateExpr::Point(p) => {
            out.insert(p.clone());
        }
        GateExpr::Not(e) => collect_points(e, out),
        GateExpr::And(l, r) | GateExpr::Or(l, r) => {
            collect_points(l, out);
            collect_points(r, out);
        }
    }
}

pub fn serialize_circuit(c: &GateCircuit) -> String {
    let mut out = String::new();
    for (p, v) in c.initial() {
        writeln!(out, "point {p} = {}", if v { "T" } else { "F" }).unwrap();
    }
    for (p, g) in c.gates() {
        writeln!(out, "{p} := {} @{}", g.expr, g.delay).unwrap();
    }
    out
}

/// Render a simulation table with aligned T/F columns, one row per
/// time slice, in the circuit's point order.
pub fn format_table(c: &GateCircuit, table: &[Vec<bool>]) -> String {
    let widths: Vec<usize> = c.points().iter().map(|p| p.len().max(1)).collect();
    let twidth = table.len().to_string().len().max(1);
    let mut out = format!("{:>twidth$}", "t");
    for (p, w) in c.points().iter().zip(&widths) {
        write!(out, " {p:>w$}").unwrap();
    }
    out.push('\n');
    for (t, row) in table.iter().enumerate() {
        write!(out, "{:>twidth$}", t + 1).unwrap();
        for (v, w) in row.iter().zip(&widths) {
            write!(out, " {:>w$}", if *v { "T" } else { "F" }).unwrap();
        }
        out.push('\n');
    }
    out
}

// ---------------------------------------------------------------------
// Choice functions and size systems
// ---------------------------------------------------------------------

/// A `{a,b,c}` set literal (possibly `{}`).
fn parse_set(ln: usize, col: usize, tok: &str) -> Result<ElemSet, IoError> {
    let Some(body) = tok.strip_prefix('{').and_then(|t| t.strip_suffix('}')) else {
        return Err(syntax(ln, col, format!("expected a {{...}} set, got {tok:?}")));
    };
    Ok(body
        .split(',')
        .map(str::trim)
        .filter(|e| !e.is_empty())
        .map(String::from)
        .collect())
}

fn show_set(s: &ElemSet) -> String {
    format!("{{{}}}", s.iter().cloned().collect::<Vec<_>>().join(","))
}

fn parse_universe(ln: usize, line: &str, rest: &str) -> Result<ElemSet, IoError> {
    let u: ElemSet = rest.split_whitespace().map(String::from).collect();
    if u.is_empty() {
        return Err(syntax(ln, column_of(line, rest), "empty universe"));
    }
    Ok(u)
}

/// Parse a choice function: a `universe a b c` line and one
/// `mu {X} = {Y}` line per domain set.
pub fn parse_function(text: &str) -> Result<ChoiceFunction, IoError> {
    let mut universe: Option<ElemSet> = None;
    let mut values: BTreeMap<ElemSet, ElemSet> = BTreeMap::new();
    for (ln, line) in lines(text) {
        if let Some(rest) = line.strip_prefix("universe ") {
            if universe.replace(parse_universe(ln, line, rest)?).is_some() {
                return Err(syntax(ln, 1, "duplicate universe line"));
            }
        } else if let Some(rest) = line.strip_prefix("mu ") {
            let Some((x, y)) = rest.split_once('=') else {
                return Err(syntax(ln, column_of(line, rest), "expected `mu {X} = {Y}`"));
            };
            let key = parse_set(ln, column_of(line, x.trim()), x.trim())?;
            let value = parse_set(ln, column_of(line, y.trim()), y.trim())?;
            if values.insert(key.clone(), value).is_some() {
                return Err(syntax(ln, 1, format!("duplicate mapping for {}", show_set(&key))));
            }
        } else {
            return Err(syntax(ln, 1, format!("unrecognized function line {line:?}")));
        }
    }
    let Some(universe) = universe else {
        return Err(syntax(1, 1, "missing universe line"));
    };
    Ok(ChoiceFunction::new(universe, values)?)
}

pub fn serialize_function(f: &ChoiceFunction) -> String {
    let mut out = format!(
        "universe {}\n",
        f.universe().iter().cloned().collect::<Vec<_>>().join(" ")
    );
    for x in f.domain() {
        writeln!(out, "mu {} = {}", show_set(x), show_set(f.mu(x).unwrap())).unwrap();
    }
    out
}

/// Parse a size system: a `universe` line and one
/// `ideal {X} = {A} {B} ...` line per reference set, listing its small
/// subsets.
pub fn parse_system(text: &str) -> Result<SizeSystem, IoError> {
    let mut universe: Option<ElemSet> = None;
    let mut ideal: BTreeMap<ElemSet, BTreeSet<ElemSet>> = BTreeMap::new();
    for (ln, line) in lines(text) {
        if let Some(rest) = line.strip_prefix("universe ") {
            if universe.replace(parse_universe(ln, line, rest)?).is_some() {
                return Err(syntax(ln, 1, "duplicate universe line"));
            }
        } else if let Some(rest) = line.strip_prefix("ideal ") {
            let Some((x, fam)) = rest.split_once('=') else {
                return Err(syntax(ln, column_of(line, rest), "expected `ideal {X} = {A} ...`"));
            };
            let key = parse_set(ln, column_of(line, x.trim()), x.trim())?;
            let mut family = BTreeSet::new();
            for tok in fam.split_whitespace() {
                family.insert(parse_set(ln, column_of(line, tok), tok)?);
            }
            if ideal.insert(key.clone(), family).is_some() {
                return Err(syntax(ln, 1, format!("duplicate ideal for {}", show_set(&key))));
            }
        } else {
            return Err(syntax(ln, 1, format!("unrecognized system line {line:?}")));
        }
    }
    let Some(universe) = universe else {
        return Err(syntax(1, 1, "missing universe line"));
    };
    Ok(SizeSystem::new(universe, ideal)?)
}

pub fn serialize_system(s: &SizeSystem) -> String {
    let mut out = format!(
        "universe {}\n",
        s.universe().iter().cloned().collect::<Vec<_>>().join(" ")
    );
    for x in s.domain() {
        let fam: Vec<String> = s.ideal(x).unwrap().iter().map(show_set).collect();
        writeln!(out, "ideal {} = {}", show_set(x), fam.join(" ")).unwrap();
    }
    out
}

// ---------------------------------------------------------------------
// Preferential structures
// ---------------------------------------------------------------------

/// An `elem#index` copy reference.
fn parse_copy_ref(ln: usize, col: usize, tok: &str) -> Result<CopyNode, IoError> {
    match tok.split_once('#') {
        Some((e, i)) if !e.is_empty() => Ok(CopyNode::new(e, i)),
        _ => Err(syntax(ln, col, format!("expected `elem#index`, got {tok:?}"))),
    }
}

/// Parse a preferential structure: `copy <elem> <index>` node lines and
/// `prec <smaller> <larger>` relation lines over `elem#index` refs.
pub fn parse_pref(text: &str) -> Result<PrefStructure, IoError> {
    let mut nodes: Vec<CopyNode> = Vec::new();
    let mut rel: Vec<(CopyNode, CopyNode)> = Vec::new();
    for (ln, line) in lines(text) {
        let mut parts = line.split_whitespace();
        match (parts.next(), parts.next(), parts.next(), parts.next()) {
            (Some("copy"), Some(elem), Some(index), None) => {
                nodes.push(CopyNode::new(elem, index));
            }
            (Some("prec"), Some(a), Some(b), None) => {
                rel.push((
                    parse_copy_ref(ln, column_of(line, a), a)?,
                    parse_copy_ref(ln, column_of(line, b), b)?,
                ));
            }
            _ => return Err(syntax(ln, 1, format!("unrecognized structure line {line:?}"))),
        }
    }
    Ok(PrefStructure::new(nodes, rel)?)
}

pub fn serialize_pref(s: &PrefStructure) -> String {
    let mut out = String::new();
    for n in s.nodes() {
        writeln!(out, "copy {} {}", n.element(), n.index()).unwrap();
    }
    for (a, b) in s.rel() {
        writeln!(out, "prec {a} {b}").unwrap();
    }
    out
}

// ---------------------------------------------------------------------
// Higher structures
// ---------------------------------------------------------------------

/// Parse a higher structure: `copy` lines as above plus
/// `arrow <id>: <origin> -> <copy|#arrow-id>` lines, optionally
/// annotated with a trailing `+` or `-` sign (ignored: every arrow is
/// an attack).
pub fn parse_gen(text: &str) -> Result<GenStructure, IoError> {
    let mut nodes: Vec<CopyNode> = Vec::new();
    let mut arrows: Vec<HigherArrow> = Vec::new();
    for (ln, line) in lines(text) {
        if let Some(rest) = line.strip_prefix("copy ") {
            let mut parts = rest.split_whitespace();
            match (parts.next(), parts.next(), parts.next()) {
                (Some(elem), Some(index), None) => nodes.push(CopyNode::new(elem, index)),
                _ => return Err(syntax(ln, 1, "expected `copy <elem> <index>`")),
            }
        } else if let Some(rest) = line.strip_prefix("arrow ") {
            let Some((left, target)) = rest.rsplit_once(" -> ") else {
                return Err(syntax(ln, 1, "expected `arrow <id>: <origin> -> <target>`"));
            };
            let target = target
                .trim()
                .trim_end_matches([' ', '+', '-'])
                .trim_end();
            let Some((id_part, origin)) = left.trim_end().rsplit_once(char::is_whitespace) else {
                return Err(syntax(ln, 1, "expected an origin before `->`"));
            };
            let Some(id) = id_part.trim_end().strip_suffix(':') else {
                return Err(syntax(ln, column_of(line, id_part), "expected `:` after the arrow id"));
            };
            let origin = parse_copy_ref(ln, column_of(line, origin), origin)?;
            let arrow = if let Some(target_id) = target.strip_prefix('#') {
                HigherArrow::to_arrow(id, origin, target_id)
            } else {
                HigherArrow::to_copy(id, origin, parse_copy_ref(ln, column_of(line, target), target)?)
            };
            arrows.push(arrow);
        } else {
            return Err(syntax(ln, 1, format!("unrecognized structure line {line:?}")));
        }
    }
    Ok(GenStructure::new(nodes, arrows)?)
}

pub fn serialize_gen(s: &GenStructure) -> String {
    let mut out = String::new();
    for n in s.nodes() {
        writeln!(out, "copy {} {}", n.element(), n.index()).unwrap();
    }
    for a in s.arrows() {
        let target = match &a.target {
            Target::Copy(c) => c.to_string(),
            Target::Arrow(id) => format!("#{id}"),
        };
        writeln!(out, "arrow {}: {} -> {}", a.id, a.origin, target).unwrap();
    }
    out
}

// ---------------------------------------------------------------------
// Conclusions
// ---------------------------------------------------------------------

pub fn format_conclusion(x: &NodeId, y: &NodeId, v: Verdict) -> String {
    let sign = match v {
        Verdict::Positive => "+",
        Verdict::Negative => "-",
        Verdict::Undefined => "?",
    };
    format!("{x} => {y} : {sign}")
}

// ---------------------------------------------------------------------
// DOT export
// ---------------------------------------------------------------------

/// Anything the DOT exporter knows how to draw.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum DotObject {
    Diagram(Diagram),
    Reactive(ReactiveDiagram),
    Pref(PrefStructure),
    Gen(GenStructure),
}

const NEGATIVE_STYLE: &str = " [style=dashed, arrowhead=tee]";

fn dot_arrow_style(a: &Arrow) -> &'static str {
    match a.polarity {
        Polarity::Positive => "",
        Polarity::Negative => NEGATIVE_STYLE,
    }
}

fn dot_diagram_body(out: &mut String, d: &Diagram) {
    for n in d.nodes() {
        if d.in_arrows(n).next().is_none() && d.out_arrows(n).next().is_none() {
            writeln!(out, "  \"{n}\";").unwrap();
        }
    }
    for a in d.arrows() {
        writeln!(out, "  \"{}\" -> \"{}\"{};", a.source, a.target, dot_arrow_style(a)).unwrap();
    }
}

/// Render the object as a DOT digraph.  Negative arrows are dashed
/// with a tee head; double arrows and higher-level arrows are drawn as
/// edges into the midpoint node of the arrow they disable.
pub fn export_dot(obj: &DotObject) -> String {
    let mut out = String::from("digraph g {\n");
    match obj {
        DotObject::Diagram(d) => dot_diagram_body(&mut out, d),
        DotObject::Reactive(r) => {
            // Arrows that take part in a double arrow are split at an
            // explicit midpoint so the double can attach edge-to-edge.
            let involved: BTreeSet<&Arrow> = r
                .doubles()
                .flat_map(|d| [&d.trigger, &d.blocked])
                .collect();
            let midpoint: BTreeMap<&Arrow, String> = involved
                .iter()
                .enumerate()
                .map(|(i, a)| (*a, format!("m{i}")))
                .collect();
            for (a, m) in &midpoint {
                writeln!(out, "  \"{m}\" [shape=point, width=0.05];").unwrap();
                writeln!(out, "  \"{}\" -> \"{m}\" [arrowhead=none];", a.source).unwrap();
                writeln!(out, "  \"{m}\" -> \"{}\"{};", a.target, dot_arrow_style(a)).unwrap();
            }
            for a in r.base().arrows() {
                if !midpoint.contains_key(a) {
                    writeln!(out, "  \"{}\" -> \"{}\"{};", a.source, a.target, dot_arrow_style(a))
                        .unwrap();
                }
            }
            for d in r.doubles() {
                writeln!(
                    out,
                    "  \"{}\" -> \"{}\" [style=dotted, constraint=false];",
                    midpoint[&d.trigger], midpoint[&d.blocked]
                )
                .unwrap();
            }
        }
        DotObject::Pref(s) => {
            for n in s.nodes() {
                writeln!(out, "  \"{n}\";").unwrap();
            }
            for (a, b) in s.rel() {
                writeln!(out, "  \"{a}\" -> \"{b}\";").unwrap();
            }
        }
        DotObject::Gen(s) => {
            // Every arrow owns a midpoint node, so arrows attacking
            // arrows have somewhere concrete to point.
            let midpoint: BTreeMap<&str, String> = s
                .arrows()
                .enumerate()
                .map(|(i, a)| (a.id.as_str(), format!("m{i}")))
                .collect();
            for n in s.nodes() {
                writeln!(out, "  \"{n}\";").unwrap();
            }
            for a in s.arrows() {
                let m = &midpoint[a.id.as_str()];
                writeln!(out, "  \"{m}\" [shape=point, width=0.05];").unwrap();
                writeln!(out, "  \"{}\" -> \"{m}\" [arrowhead=none];", a.origin).unwrap();
                match &a.target {
                    Target::Copy(c) => writeln!(out, "  \"{m}\" -> \"{c}\";").unwrap(),
                    Target::Arrow(id) => writeln!(
                        out,
                        "  \"{m}\" -> \"{}\" [style=dashed, constraint=false];",
                        midpoint[id.as_str()]
                    )
                    .unwrap(),
                }
            }
        }
    }
    out.push_str("}\n");
    out
}

/// DOT export of a layer-ranked structure: as [`export_dot`], plus one
/// `rank=same` cluster per block of the partition.
pub fn export_dot_ranked(s: &PrefStructure, p: &RankedPartition) -> String {
    let plain = export_dot(&DotObject::Pref(s.clone()));
    let mut out = plain.strip_suffix("}\n").unwrap().to_string();
    for block in p.blocks() {
        let members: Vec<String> = s
            .nodes()
            .iter()
            .filter(|n| block.contains(n.element()))
            .map(|n| format!("\"{n}\";"))
            .collect();
        writeln!(out, "  {{ rank=same; {} }}", members.join(" ")).unwrap();
    }
    out.push_str("}\n");
    out
}

// ---------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------

/// Target of a `check` command.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CheckObject {
    Function(ChoiceFunction),
    System(SizeSystem),
}

/// Target of a `verify` command.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum VerifyTarget {
    Pref(PrefStructure),
    Gen(GenStructure),
}

/// Which representation construction `represent` runs.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ReprKind {
    General,
    Transitive,
    Smooth,
    SmoothTransitive,
    Ranked,
    LayerRanked { blocks: Vec<ElemSet>, smooth: bool },
    Attacking,
    Level3,
}

impl std::str::FromStr for ReprKind {
    type Err = String;

    fn from_str(s: &str) -> Result<ReprKind, String> {
        Ok(match s {
            "general" => ReprKind::General,
            "transitive" => ReprKind::Transitive,
            "smooth" => ReprKind::Smooth,
            "smooth-transitive" => ReprKind::SmoothTransitive,
            "ranked" => ReprKind::Ranked,
            "attacking" => ReprKind::Attacking,
            "level3" => ReprKind::Level3,
            _ => return Err(format!("unknown representation kind {s:?}")),
        })
    }
}

/// One invocation of the text interface.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Command {
    Infer { diagram: Diagram, x: NodeId, y: NodeId, mode: Mode },
    Check { object: CheckObject, property: String },
    Represent { function: ChoiceFunction, kind: ReprKind },
    Verify { structure: VerifyTarget, function: ChoiceFunction },
    Reactive { diagram: Diagram, origin: NodeId },
    Horizon { net: BlockNet, seeds: BTreeSet<NodeId> },
    ExportDot { object: DotObject },
    Search { hypothesis: Vec<String>, conclusion: String, bound: usize, seed: u64 },
}

/// Exit status plus the full output text of one command.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RunOutput {
    pub status: i32,
    pub text: String,
}

fn ok(text: impl Into<String>) -> RunOutput {
    RunOutput { status: 0, text: text.into() }
}

fn violated(text: impl Into<String>) -> RunOutput {
    RunOutput { status: 1, text: text.into() }
}

fn input_error(text: impl std::fmt::Display) -> RunOutput {
    RunOutput { status: 2, text: format!("error: {text}\n") }
}

fn report_check(label: &str, r: &crate::choice::CheckResult) -> RunOutput {
    if r.holds {
        ok(format!("{label} holds\n"))
    } else {
        let w = r.witness.as_ref().expect("failed checks carry a witness");
        violated(format!("{label} fails at {w}\n"))
    }
}

fn pref_refusal(e: PrefError) -> RunOutput {
    match e {
        PrefError::PreconditionFailed { .. } | PrefError::CycleInQualityRelation(_) => {
            violated(format!("refused: {e}\n"))
        }
        other => input_error(other),
    }
}

/// Execute one command.  Exit status 0 means success (the property
/// holds, the construction succeeded); 1 means a violated property or
/// refused construction, with the witness in the output; 2 means the
/// input was unusable.
pub fn run(cmd: &Command) -> RunOutput {
    match cmd {
        Command::Infer { diagram, x, y, mode } => match conclude(diagram, x, y, *mode) {
            Ok(v) => ok(format!("{}\n", format_conclusion(x, y, v))),
            Err(e) => input_error(e),
        },
        Command::Check { object, property } => match object {
            CheckObject::Function(f) => {
                let p: Property = match property.parse() {
                    Ok(p) => p,
                    Err(e) => return input_error(e),
                };
                match check(f, &p) {
                    Ok(r) => report_check(property, &r),
                    Err(e) => input_error(e),
                }
            }
            CheckObject::System(s) => {
                let rule: SizeRule = match property.parse() {
                    Ok(r) => r,
                    Err(e) => return input_error(e),
                };
                match check_size_rule(s, &rule) {
                    Ok(r) => report_check(property, &r),
                    Err(e) => input_error(e),
                }
            }
        },
        Command::Represent { function, kind } => {
            let pref_result = match kind {
                ReprKind::General => represent_general(function),
                ReprKind::Transitive => represent_transitive(function),
                ReprKind::Smooth => represent_smooth(function),
                ReprKind::SmoothTransitive => represent_smooth_transitive(function),
                ReprKind::Ranked => represent_ranked(function),
                ReprKind::LayerRanked { blocks, smooth } => {
                    match RankedPartition::new(blocks.clone(), function.universe()) {
                        Ok(p) => represent_layer_ranked(function, &p, *smooth),
                        Err(e) => return input_error(e),
                    }
                }
                ReprKind::Attacking => {
                    let pair = crate::higher::AttackPair::from_choice(function);
                    return ok(serialize_gen(&crate::higher::represent_attacking(&pair)));
                }
                ReprKind::Level3 => {
                    return match crate::higher::represent_level3(function) {
                        Ok(s) => ok(serialize_gen(&s)),
                        Err(e @ HigherError::PreconditionFailed { .. }) => {
                            violated(format!("refused: {e}\n"))
                        }
                        Err(e) => input_error(e),
                    };
                }
            };
            match pref_result {
                Ok(s) => ok(serialize_pref(&s)),
                Err(e) => pref_refusal(e),
            }
        }
        Command::Verify { structure, function } => {
            let r = match structure {
                VerifyTarget::Pref(s) => verify(s, function),
                VerifyTarget::Gen(s) => verify_gen(s, function),
            };
            report_check("representation", &r)
        }
        Command::Reactive { diagram, origin } => match compile(diagram, origin) {
            Ok(r) => ok(serialize_reactive(&r)),
            Err(e) => input_error(e),
        },
        Command::Horizon { net, seeds } => match horizon(net, seeds) {
            Ok(h) => {
                let shown: Vec<String> = h.visible().iter().map(|n| n.to_string()).collect();
                ok(format!("{}\n", shown.join(" ")))
            }
            Err(e) => input_error(e),
        },
        Command::ExportDot { object } => ok(export_dot(object)),
        Command::Search { hypothesis, conclusion, bound, seed } => {
            let mut hyps = Vec::new();
            for h in hypothesis {
                match h.parse::<Property>() {
                    Ok(p) => hyps.push(p),
                    Err(e) => return input_error(e),
                }
            }
            let conclusion: Property = match conclusion.parse() {
                Ok(p) => p,
                Err(e) => return input_error(e),
            };
            let config = SearchConfig {
                max_universe: (*bound).max(1),
                seed: *seed,
                ..SearchConfig::default()
            };
            let header = format!("# seed {} bound {}\n", seed, bound);
            match search_counterexample(&hyps, &conclusion, &config) {
                Ok(SearchOutcome::CounterExample { function, witness }) => violated(format!(
                    "{header}counterexample at {witness}:\n{}",
                    serialize_function(&function)
                )),
                Ok(SearchOutcome::Exhausted { examined }) => {
                    ok(format!("{header}no counterexample ({examined} functions examined)\n"))
                }
                Err(e) => input_error(e),
            }
        }
    }
}

/// Does the higher structure's choice coincide with `f` on its domain?
fn verify_gen(s: &GenStructure, f: &ChoiceFunction) -> crate::choice::CheckResult {
    for x in f.domain() {
        let got = s.higher_mu(x);
        if &got != f.mu(x).unwrap() {
            return crate::choice::CheckResult {
                holds: false,
                witness: Some(crate::choice::Witness {
                    sets: vec![x.clone(), got],
                    elems: Vec::new(),
                }),
            };
        }
    }
    crate::choice::CheckResult { holds: true, witness: None }
}

/// Parse `{a,b}|{c}` into partition blocks (for the layer-ranked
/// representation's command-line option).
pub fn parse_blocks(text: &str) -> Result<Vec<ElemSet>, IoError> {
    text.split('|')
        .map(|tok| parse_set(1, column_of(text, tok), tok.trim()))
        .collect()
}

/// Sorted element list for witness-style output.
pub fn parse_elems(text: &str) -> Vec<Elem> {
    text.split_whitespace().map(String::from).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::choice::fixtures::{cum_without_pr, function};
    use crate::infer::valid_paths;
    use crate::reactive::simulate_circuit;

    fn n(s: &str) -> NodeId {
        NodeId::new(s)
    }

    fn tweety_text() -> &'static str {
        "# the classic specificity diagram\na -> b\na -> c\nc -> b\nb -> d\nc !> d\n"
    }

    #[test]
    fn diagram_round_trip_is_canonical() {
        let d = parse_diagram(tweety_text()).unwrap();
        let canon = serialize_diagram(&d);
        assert_eq!(canon, "a -> b\na -> c\nb -> d\nc -> b\nc !> d\n");
        assert_eq!(serialize_diagram(&parse_diagram(&canon).unwrap()), canon);
    }

    #[test]
    fn diagram_matches_hand_built_fixture() {
        let parsed = parse_diagram(tweety_text()).unwrap();
        let fixture = Diagram::parse_arrows(&["a -> b", "a -> c", "c -> b", "b -> d", "c !> d"]);
        assert_eq!(parsed, fixture);
    }

    #[test]
    fn isolated_nodes_survive_round_trip() {
        let d = parse_diagram("node q\na -> b\n").unwrap();
        assert!(d.has_node(&n("q")));
        assert_eq!(serialize_diagram(&d), "node q\na -> b\n");
    }

    #[test]
    fn truncated_arrow_is_a_parse_error() {
        let err = parse_diagram("a ->").unwrap_err();
        match err {
            IoError::Syntax(p) => {
                assert_eq!(p.line, 1);
                assert_eq!(p.column, 1);
            }
            other => panic!("expected a syntax error, got {other:?}"),
        }
    }

    #[test]
    fn parse_errors_locate_the_line() {
        let err = parse_diagram("a -> b\n\n# fine\nwhat is this\n").unwrap_err();
        match err {
            IoError::Syntax(p) => assert_eq!(p.line, 4),
            other => panic!("expected a syntax error, got {other:?}"),
        }
    }

    #[test]
    fn semantic_errors_pass_through() {
        let err = parse_diagram("a -> b\nb -> a\n").unwrap_err();
        assert!(matches!(err, IoError::Net(NetError::CycleError(_))));
    }

    #[test]
    fn reactive_round_trip() {
        let d = parse_diagram(tweety_text()).unwrap();
        let r = compile(&d, &n("a")).unwrap();
        let text = serialize_reactive(&r);
        let back = parse_reactive(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(serialize_reactive(&back), text);
    }

    #[test]
    fn reactive_rejects_foreign_doubles() {
        let err = parse_reactive("origin a\na -> b\n(a -> b) ~> (b -> z)\n").unwrap_err();
        assert!(matches!(err, IoError::Reactive(ReactiveError::ForeignDouble(_))));
    }

    #[test]
    fn reactive_requires_an_origin() {
        let err = parse_reactive("a -> b\n").unwrap_err();
        assert!(matches!(err, IoError::Syntax(_)));
    }

    #[test]
    fn circuit_round_trip_and_simulation() {
        let text = "point a = T\npoint b = F\nb := !(a & b) | b @1\n";
        let c = parse_circuit(text).unwrap();
        let canon = serialize_circuit(&c);
        assert_eq!(parse_circuit(&canon).unwrap(), c);
        let table = simulate_circuit(&c, 3).unwrap();
        assert_eq!(table[0], vec![true, false]);
    }

    #[test]
    fn circuit_expression_precedence() {
        let c = parse_circuit("point a = T\npoint b = F\npoint c = F\nd := a | b & !c @2\n")
            .unwrap();
        let (_, gate) = c.gates().next().unwrap();
        assert_eq!(gate.expr.to_string(), "(a | (b & !c))");
        assert_eq!(gate.delay, 2);
    }

    #[test]
    fn table_columns_align() {
        let c = parse_circuit("point in = T\nout := !in @1\n").unwrap();
        let table = simulate_circuit(&c, 2).unwrap();
        let text = format_table(&c, &table);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t in out");
        assert_eq!(lines[1], "1  T   F");
        assert_eq!(lines[2], "2  T   F");
    }

    #[test]
    fn function_round_trip() {
        let f = cum_without_pr();
        let text = serialize_function(&f);
        assert_eq!(parse_function(&text).unwrap(), f);
        assert_eq!(serialize_function(&parse_function(&text).unwrap()), text);
    }

    #[test]
    fn function_parses_empty_sets() {
        let f = parse_function("universe a b\nmu {a,b} = {}\nmu {} = {}\n").unwrap();
        assert!(f.mu(&ElemSet::new()).unwrap().is_empty());
    }

    #[test]
    fn function_rejects_duplicate_mappings() {
        let err = parse_function("universe a\nmu {a} = {a}\nmu {a} = {}\n").unwrap_err();
        assert!(matches!(err, IoError::Syntax(p) if p.line == 3));
    }

    #[test]
    fn system_round_trip() {
        let s = crate::choice::fixtures::system(
            &["a", "b"],
            &[(&["a", "b"], &[&[], &["a"]])],
        );
        let text = serialize_system(&s);
        assert_eq!(text, "universe a b\nideal {a,b} = {} {a}\n");
        assert_eq!(parse_system(&text).unwrap(), s);
    }

    #[test]
    fn pref_round_trip() {
        let f = function(&["a", "b"], &[(&["a", "b"], &["a"]), (&["a"], &["a"]), (&["b"], &["b"])]);
        let s = represent_general(&f).unwrap();
        let text = serialize_pref(&s);
        assert_eq!(parse_pref(&text).unwrap(), s);
    }

    #[test]
    fn pref_rejects_dangling_relation() {
        let err = parse_pref("copy a 0\nprec a#0 b#0\n").unwrap_err();
        assert!(matches!(err, IoError::Pref(PrefError::UnknownCopy(_))));
    }

    #[test]
    fn gen_round_trip() {
        let s = crate::higher::fixtures::deep_exchange_structure();
        let text = serialize_gen(&s);
        assert_eq!(parse_gen(&text).unwrap(), s);
        assert_eq!(serialize_gen(&parse_gen(&text).unwrap()), text);
    }

    #[test]
    fn gen_accepts_sign_annotations() {
        let with_signs = "copy a 0\ncopy b 0\narrow a1: a#0 -> b#0 -\narrow a2: b#0 -> #a1 +\n";
        let s = parse_gen(with_signs).unwrap();
        assert_eq!(s.level(), 2);
        // The canonical form drops the annotations.
        assert!(!serialize_gen(&s).contains(" -\n"));
    }

    #[test]
    fn dot_tweety_has_five_edges_one_negative() {
        let d = parse_diagram(tweety_text()).unwrap();
        let dot = export_dot(&DotObject::Diagram(d));
        assert_eq!(dot.matches(" -> ").count(), 5);
        assert_eq!(dot.matches(NEGATIVE_STYLE).count(), 1);
        assert!(dot.starts_with("digraph g {"));
    }

    #[test]
    fn dot_empty_diagram_is_header_only() {
        let d = Diagram::new([], []).unwrap();
        assert_eq!(export_dot(&DotObject::Diagram(d)), "digraph g {\n}\n");
    }

    #[test]
    fn dot_reactive_uses_midpoints() {
        let d = parse_diagram(tweety_text()).unwrap();
        let r = compile(&d, &n("a")).unwrap();
        let dot = export_dot(&DotObject::Reactive(r.clone()));
        let doubles = r.doubles().count();
        assert!(doubles > 0);
        assert_eq!(dot.matches("constraint=false").count(), doubles);
        assert!(dot.contains("shape=point"));
    }

    #[test]
    fn dot_gen_links_arrow_midpoints() {
        let s = crate::higher::fixtures::unstable_attack();
        let dot = export_dot(&DotObject::Gen(s.clone()));
        let level2 = s.arrows().filter(|a| s.level_of(&a.id) == Some(2)).count();
        assert_eq!(dot.matches("style=dashed, constraint=false").count(), level2);
    }

    #[test]
    fn dot_ranked_emits_rank_clusters() {
        let f = function(&["a", "b"], &[(&["a", "b"], &["a"]), (&["a"], &["a"]), (&["b"], &["b"])]);
        let s = represent_general(&f).unwrap();
        let p = RankedPartition::new(
            vec![ElemSet::from(["a".into()]), ElemSet::from(["b".into()])],
            f.universe(),
        )
        .unwrap();
        let dot = export_dot_ranked(&s, &p);
        assert_eq!(dot.matches("rank=same").count(), 2);
        assert!(dot.ends_with("}\n"));
    }

    #[test]
    fn run_infer_reports_the_verdict() {
        let d = parse_diagram(tweety_text()).unwrap();
        let out = run(&Command::Infer {
            diagram: d,
            x: n("a"),
            y: n("d"),
            mode: Mode::OffPathSplit,
        });
        assert_eq!(out.status, 0);
        assert_eq!(out.text, "a => d : -\n");
    }

    #[test]
    fn run_infer_unknown_node_is_an_input_error() {
        let d = parse_diagram(tweety_text()).unwrap();
        let out = run(&Command::Infer {
            diagram: d,
            x: n("a"),
            y: n("zz"),
            mode: Mode::OffPathSplit,
        });
        assert_eq!(out.status, 2);
    }

    #[test]
    fn run_check_prints_the_witness() {
        let out = run(&Command::Check {
            object: CheckObject::Function(cum_without_pr()),
            property: "muPR".into(),
        });
        assert_eq!(out.status, 1);
        assert!(out.text.contains("muPR fails at"));
        assert!(out.text.contains("{a,b}"));
    }

    #[test]
    fn run_check_passing_property() {
        let out = run(&Command::Check {
            object: CheckObject::Function(cum_without_pr()),
            property: "muSubset".into(),
        });
        assert_eq!(out.status, 0);
        assert_eq!(out.text, "muSubset holds\n");
    }

    #[test]
    fn run_represent_then_verify() {
        let f = function(&["a", "b"], &[(&["a", "b"], &["a"]), (&["a"], &["a"]), (&["b"], &["b"])]);
        let out = run(&Command::Represent { function: f.clone(), kind: ReprKind::General });
        assert_eq!(out.status, 0);
        let s = parse_pref(&out.text).unwrap();
        let v = run(&Command::Verify { structure: VerifyTarget::Pref(s), function: f });
        assert_eq!(v.status, 0);
    }

    #[test]
    fn run_represent_refusal_exits_one() {
        // Ranked representation needs definite choices on finite
        // nonempty sets; an everywhere-empty mu is refused.
        let f = function(&["a", "b"], &[(&["a", "b"], &[]), (&["a"], &[]), (&["b"], &[])]);
        let out = run(&Command::Represent { function: f, kind: ReprKind::Ranked });
        assert_eq!(out.status, 1);
        assert!(out.text.starts_with("refused: "));
    }

    #[test]
    fn run_reactive_emits_parseable_output() {
        let d = parse_diagram(tweety_text()).unwrap();
        let out = run(&Command::Reactive { diagram: d.clone(), origin: n("a") });
        assert_eq!(out.status, 0);
        let r = parse_reactive(&out.text).unwrap();
        let vs = valid_paths(&d, Mode::OffPathSplit).unwrap();
        let from_a: BTreeSet<_> = vs.from_origin(&n("a")).cloned().collect();
        assert_eq!(r.traverse(), from_a);
    }

    #[test]
    fn run_horizon_prints_sorted_visible_set() {
        let net = parse_diagram("a -> b\nb !> c\na -> c\n").unwrap();
        let out = run(&Command::Horizon { net, seeds: [n("a")].into() });
        assert_eq!(out.status, 0);
        assert_eq!(out.text, "a b\n");
    }

    #[test]
    fn run_search_prints_seed_header() {
        let out = run(&Command::Search {
            hypothesis: vec!["muCUM".into()],
            conclusion: "muPR".into(),
            bound: 2,
            seed: 7,
        });
        assert_eq!(out.status, 1);
        assert!(out.text.starts_with("# seed 7 bound 2\n"));
        assert!(out.text.contains("counterexample"));
    }

    #[test]
    fn run_search_exhausted_exits_zero() {
        let out = run(&Command::Search {
            hypothesis: vec!["muPR".into(), "muCUM".into()],
            conclusion: "muCM".into(),
            bound: 1,
            seed: 0,
        });
        assert_eq!(out.status, 0);
        assert!(out.text.contains("no counterexample"));
    }

    #[test]
    fn run_verify_gen_structure() {
        let f = crate::higher::fixtures::deep_exchange();
        let s = crate::higher::represent_level3(&f).unwrap();
        let out = run(&Command::Verify { structure: VerifyTarget::Gen(s), function: f });
        assert_eq!(out.status, 0);
    }

    #[test]
    fn blocks_option_parses() {
        let blocks = parse_blocks("{a,b}|{c}").unwrap();
        assert_eq!(blocks.len(), 2);
        assert_eq!(show_set(&blocks[1]), "{c}");
    }
}
