//! Reactive-graph compilation of inheritance diagrams.
//!
//! Relative to a fixed origin, a diagram compiles into a reactive graph:
//! the base diagram plus *double arrows*, each of which disables another
//! arrow once its trigger has been traversed.  Naive concatenation-only
//! traversal of the compiled graph then yields exactly the valid paths
//! from the origin, with no preclusion reasoning at walk time.  The
//! module also provides the pair-label memoization of the pairwise
//! arbitration algorithm, signposts marking dead ends towards a goal,
//! and a small synchronous gate-circuit simulator.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::infer::{conclude, valid_paths, InferError, Mode, Verdict};
use crate::net::{Arrow, Diagram, NetError, NodeId, Path, Polarity};

/// An arrow between arrows: once `trigger` has been traversed, `blocked`
/// is switched off for the remainder of the walk.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct DoubleArrow {
    pub trigger: Arrow,
    pub blocked: Arrow,
}

impl std::fmt::Display for DoubleArrow {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}) ~> ({})", self.trigger, self.blocked)
    }
}

#[derive(Error, Debug, PartialEq, Eq)]
pub enum ReactiveError {
    #[error(transparent)]
    Infer(#[from] InferError),
    #[error("no valid path from {0} to {1}: nothing to put signposts on")]
    NoValidPath(NodeId, NodeId),
    #[error("point {0} has neither a gate nor an initial value")]
    UndrivenPoint(String),
    #[error("gate references undeclared point {0}")]
    UnknownPoint(String),
    #[error("gate for {0} must have a delay of at least one time slice")]
    BadDelay(String),
    #[error("double arrow endpoint {0} is not an arrow of the base diagram")]
    ForeignDouble(Arrow),
}

impl From<NetError> for ReactiveError {
    fn from(e: NetError) -> Self {
        ReactiveError::Infer(InferError::Net(e))
    }
}

/// A diagram compiled for one origin: the unchanged base plus the double
/// arrows that switch impossible continuations off.  Erasing the doubles
/// recovers the base diagram exactly.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ReactiveDiagram {
    base: Diagram,
    origin: NodeId,
    doubles: BTreeSet<DoubleArrow>,
}

impl ReactiveDiagram {
    /// Assembles a reactive diagram from explicit parts, checking that
    /// the origin is a node and every double connects base arrows.
    pub fn new(
        base: Diagram,
        origin: NodeId,
        doubles: impl IntoIterator<Item = DoubleArrow>,
    ) -> Result<ReactiveDiagram, ReactiveError> {
        if !base.has_node(&origin) {
            return Err(NetError::UnknownNode(origin).into());
        }
        let doubles: BTreeSet<DoubleArrow> = doubles.into_iter().collect();
        for d in &doubles {
            for end in [&d.trigger, &d.blocked] {
                if !base.has_arrow(&end.source, &end.target, end.polarity) {
                    return Err(ReactiveError::ForeignDouble(end.clone()));
                }
            }
        }
        Ok(ReactiveDiagram { base, origin, doubles })
    }

    pub fn base(&self) -> &Diagram {
        &self.base
    }

    pub fn origin(&self) -> &NodeId {
        &self.origin
    }

    pub fn doubles(&self) -> impl Iterator<Item = &DoubleArrow> {
        self.doubles.iter()
    }

    /// Reset for a new origin: dropping all double arrows gives back the
    /// base diagram; nothing else was mutated.
    pub fn erase_doubles(&self) -> Diagram {
        self.base.clone()
    }

    fn blocked(&self, a: &Arrow, walked: &Path) -> bool {
        self.doubles
            .iter()
            .any(|d| &d.blocked == a && walked.arrows().contains(&d.trigger))
    }

    /// Naive traversal: extend chains from the origin arrow by arrow,
    /// skipping switched-off arrows, stopping after a negative arrow.
    /// No preclusion is consulted; the doubles already encode it.
    pub fn traverse(&self) -> BTreeSet<Path> {
        let mut out = BTreeSet::new();
        let mut stack: Vec<Path> = self
            .base
            .out_arrows(&self.origin)
            .map(|a| Path::direct(a.clone()))
            .collect();
        while let Some(p) = stack.pop() {
            if p.polarity() == Polarity::Positive {
                for a in self.base.out_arrows(p.endpoint()) {
                    if !self.blocked(a, &p) {
                        stack.push(p.extend(a.clone()).expect("chained extension"));
                    }
                }
            }
            out.insert(p);
        }
        out
    }
}

/// The double arrows determined by a set of origin paths: an arrow with a
/// reachable source that continues no path of the set is blocked, fired
/// by the first arrow of every path leading to its source.
fn doubles_from(base: &Diagram, origin: &NodeId, paths: &BTreeSet<Path>) -> BTreeSet<DoubleArrow> {
    let mut doubles = BTreeSet::new();
    for a in base.arrows() {
        if a.source == *origin {
            // Direct links are always valid continuations.
            continue;
        }
        let sigmas: Vec<&Path> = paths
            .iter()
            .filter(|p| p.endpoint() == &a.source && p.polarity() == Polarity::Positive)
            .collect();
        if sigmas.is_empty() {
            // Unreachable source: the arrow can never be walked anyway.
            continue;
        }
        let extended = paths.iter().any(|p| p.last() == a);
        if !extended {
            for s in &sigmas {
                doubles.insert(DoubleArrow {
                    trigger: s.first().clone(),
                    blocked: a.clone(),
                });
            }
        }
    }
    doubles
}

/// Compile `d` for `origin`: traversal of the result enumerates exactly
/// the valid paths from `origin` under split-validity preclusion.
pub fn compile(d: &Diagram, origin: &NodeId) -> Result<ReactiveDiagram, ReactiveError> {
    if !d.has_node(origin) {
        return Err(NetError::UnknownNode(origin.clone()).into());
    }
    let vs = valid_paths(d, Mode::OffPathSplit)?;
    let from_origin: BTreeSet<Path> = vs.from_origin(origin).cloned().collect();
    Ok(ReactiveDiagram {
        base: d.clone(),
        origin: origin.clone(),
        doubles: doubles_from(d, origin, &from_origin),
    })
}

/// Re-derive the double arrows from the compiled graph's own traversal.
/// Compilation only keeps valid continuations, so this is the identity
/// on compiled graphs (the compile is idempotent).
pub fn recompile_fixpoint(r: &ReactiveDiagram) -> ReactiveDiagram {
    let walked = r.traverse();
    ReactiveDiagram {
        base: r.base.clone(),
        origin: r.origin.clone(),
        doubles: doubles_from(&r.base, &r.origin, &walked),
    }
}

/// Memoized connection status of an ordered node pair: nothing yet, a
/// potential path of one or both signs, or a settled verdict.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum PairLabel {
    /// `*`: no connection (or an unresolved contradiction).
    None,
    /// `p+`: a positive potential path, validity still open.
    PotentialPositive,
    /// `p-`: a negative potential path, validity still open.
    PotentialNegative,
    /// `p+-`: potential paths of both signs, validity still open.
    PotentialBoth,
    /// `v+`: a valid positive path exists (final).
    ValidPositive,
    /// `v-`: a valid negative path exists (final).
    ValidNegative,
}

impl std::fmt::Display for PairLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            PairLabel::None => "*",
            PairLabel::PotentialPositive => "p+",
            PairLabel::PotentialNegative => "p-",
            PairLabel::PotentialBoth => "p+-",
            PairLabel::ValidPositive => "v+",
            PairLabel::ValidNegative => "v-",
        };
        write!(f, "{s}")
    }
}

impl PairLabel {
    fn add_potential(self, polarity: Polarity) -> PairLabel {
        match (self, polarity) {
            (PairLabel::None, Polarity::Positive) => PairLabel::PotentialPositive,
            (PairLabel::None, Polarity::Negative) => PairLabel::PotentialNegative,
            (PairLabel::PotentialPositive, Polarity::Negative) => PairLabel::PotentialBoth,
            (PairLabel::PotentialNegative, Polarity::Positive) => PairLabel::PotentialBoth,
            // v-labels are final; p-labels absorb repeats.
            (l, _) => l,
        }
    }

    fn valid(polarity: Polarity) -> PairLabel {
        match polarity {
            Polarity::Positive => PairLabel::ValidPositive,
            Polarity::Negative => PairLabel::ValidNegative,
        }
    }
}

/// The staged pair-label fixpoint: direct links settle immediately,
/// potential paths propagate forwards, and predecessor arbitration with
/// preclusion resolves every remaining pair to `v+`, `v-` or `*`.
pub fn memo_labels(d: &Diagram) -> BTreeMap<(NodeId, NodeId), PairLabel> {
    let mut m: BTreeMap<(NodeId, NodeId), PairLabel> = BTreeMap::new();
    for x in d.nodes() {
        for y in d.nodes() {
            if x != y {
                m.insert((x.clone(), y.clone()), PairLabel::None);
            }
        }
    }
    for a in d.arrows() {
        m.insert(
            (a.source.clone(), a.target.clone()),
            PairLabel::valid(a.polarity),
        );
    }

    // Propagate potential paths: a positive connection followed by a
    // direct link yields a potential connection of the link's sign.
    let mut changed = true;
    while changed {
        changed = false;
        for a in d.arrows() {
            for x in d.nodes() {
                if x == &a.target {
                    continue;
                }
                let via = x == &a.source
                    || matches!(
                        m[&(x.clone(), a.source.clone())],
                        PairLabel::PotentialPositive
                            | PairLabel::PotentialBoth
                            | PairLabel::ValidPositive
                    );
                if !via {
                    continue;
                }
                let key = (x.clone(), a.target.clone());
                let old = m[&key];
                let new = old.add_potential(a.polarity);
                if new != old {
                    m.insert(key, new);
                    changed = true;
                }
            }
        }
    }

    // Arbitrate the still-potential pairs in topological target order,
    // so every sub-query consulted below is already settled.
    for y in d.topological_order() {
        let preds: Vec<&Arrow> = d.in_arrows(&y).collect();
        for x in d.nodes() {
            if x == &y {
                continue;
            }
            let key = (x.clone(), y.clone());
            if !matches!(
                m[&key],
                PairLabel::PotentialPositive | PairLabel::PotentialNegative | PairLabel::PotentialBoth
            ) {
                continue;
            }
            let reachable: Vec<&Arrow> = preds
                .iter()
                .filter(|a| m[&(x.clone(), a.source.clone())] == PairLabel::ValidPositive)
                .copied()
                .collect();
            let survivors: Vec<&Arrow> = reachable
                .iter()
                .filter(|a| {
                    !reachable.iter().any(|b| {
                        b.source != a.source
                            && b.polarity != a.polarity
                            && m[&(b.source.clone(), a.source.clone())] == PairLabel::ValidPositive
                    })
                })
                .copied()
                .collect();
            let label = match survivors.split_first() {
                Some((first, rest)) if rest.iter().all(|a| a.polarity == first.polarity) => {
                    PairLabel::valid(first.polarity)
                }
                _ => PairLabel::None,
            };
            m.insert(key, label);
        }
    }
    m
}

/// Dead-end markers for the trip from `x` to `y`: the arrows leaving a
/// node of some valid `x`-to-`y` path which no valid `x`-to-`y` path
/// traverses.  Walking through one of them can never reach `y` validly.
pub fn signposts(d: &Diagram, x: &NodeId, y: &NodeId) -> Result<BTreeSet<Arrow>, ReactiveError> {
    let verdict = conclude(d, x, y, Mode::OffPathSplit)?;
    if verdict == Verdict::Undefined {
        return Err(ReactiveError::NoValidPath(x.clone(), y.clone()));
    }
    let vs = valid_paths(d, Mode::OffPathSplit)?;
    let goal_paths: Vec<&Path> = vs
        .paths()
        .filter(|p| p.origin() == x && p.endpoint() == y)
        .collect();
    let mut on_nodes: BTreeSet<&NodeId> = goal_paths.iter().flat_map(|p| p.nodes()).collect();
    // Once at the destination there is nothing left to signpost.
    on_nodes.remove(y);
    let on_arrows: BTreeSet<&Arrow> = goal_paths
        .iter()
        .flat_map(|p| p.arrows().iter())
        .collect();
    Ok(d.arrows()
        .filter(|a| on_nodes.contains(&a.source) && !on_arrows.contains(a))
        .cloned()
        .collect())
}

/// A boolean combination of measurement points.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum GateExpr {
    Point(String),
    Not(Box<GateExpr>),
    And(Box<GateExpr>, Box<GateExpr>),
    Or(Box<GateExpr>, Box<GateExpr>),
}

impl GateExpr {
    pub fn point(name: &str) -> GateExpr {
        GateExpr::Point(name.to_string())
    }

    pub fn not(e: GateExpr) -> GateExpr {
        GateExpr::Not(Box::new(e))
    }

    pub fn and(l: GateExpr, r: GateExpr) -> GateExpr {
        GateExpr::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: GateExpr, r: GateExpr) -> GateExpr {
        GateExpr::Or(Box::new(l), Box::new(r))
    }

    fn points(&self, out: &mut BTreeSet<String>) {
        match self {
            GateExpr::Point(p) => {
                out.insert(p.clone());
            }
            GateExpr::Not(e) => e.points(out),
            GateExpr::And(l, r) | GateExpr::Or(l, r) => {
                l.points(out);
                r.points(out);
            }
        }
    }

    fn eval(&self, row: &BTreeMap<String, bool>) -> bool {
        match self {
            GateExpr::Point(p) => row[p],
            GateExpr::Not(e) => !e.eval(row),
            GateExpr::And(l, r) => l.eval(row) && r.eval(row),
            GateExpr::Or(l, r) => l.eval(row) || r.eval(row),
        }
    }
}

impl std::fmt::Display for GateExpr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GateExpr::Point(p) => write!(f, "{p}"),
            GateExpr::Not(e) => write!(f, "!{e}"),
            GateExpr::And(l, r) => write!(f, "({l} & {r})"),
            GateExpr::Or(l, r) => write!(f, "({l} | {r})"),
        }
    }
}

/// One gate: its defining expression and output delay in time slices.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Gate {
    pub expr: GateExpr,
    pub delay: usize,
}

/// A synchronous circuit over named boolean measurement points.  Points
/// without a gate are inputs and keep their initial value; every point is
/// driven by at most one gate.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GateCircuit {
    points: Vec<String>,
    gates: BTreeMap<String, Gate>,
    initial: BTreeMap<String, bool>,
}

impl GateCircuit {
    pub fn new(
        points: Vec<String>,
        gates: BTreeMap<String, Gate>,
        initial: BTreeMap<String, bool>,
    ) -> Result<GateCircuit, ReactiveError> {
        let declared: BTreeSet<&String> = points.iter().collect();
        let mut referenced = BTreeSet::new();
        for (p, g) in &gates {
            if !declared.contains(p) {
                return Err(ReactiveError::UnknownPoint(p.clone()));
            }
            if g.delay == 0 {
                return Err(ReactiveError::BadDelay(p.clone()));
            }
            g.expr.points(&mut referenced);
        }
        for p in referenced {
            if !declared.contains(&p) {
                return Err(ReactiveError::UnknownPoint(p));
            }
        }
        for p in initial.keys() {
            if !declared.contains(p) {
                return Err(ReactiveError::UnknownPoint(p.clone()));
            }
        }
        for p in &points {
            if !gates.contains_key(p) && !initial.contains_key(p) {
                return Err(ReactiveError::UndrivenPoint(p.clone()));
            }
        }
        Ok(GateCircuit {
            points,
            gates,
            initial,
        })
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn gates(&self) -> impl Iterator<Item = (&String, &Gate)> {
        self.gates.iter()
    }

    pub fn initial(&self) -> impl Iterator<Item = (&String, bool)> {
        self.initial.iter().map(|(p, v)| (p, *v))
    }

    /// Time-1 value: the initial assignment; gate outputs without an
    /// explicit initial value start out false.
    fn start(&self, p: &str) -> bool {
        self.initial.get(p).copied().unwrap_or(false)
    }
}

/// Run the circuit for `steps` time slices and return the transition
/// table, one row of point values per slice.  The value of a gated point
/// at time `t` is its gate applied to the values at `t - delay`; until
/// that slice exists the point holds its initial value.  Inputs are held
/// constant throughout.
pub fn simulate_circuit(c: &GateCircuit, steps: usize) -> Result<Vec<Vec<bool>>, ReactiveError> {
    assert!(steps >= 1, "a simulation has at least one time slice");
    let mut history: Vec<BTreeMap<String, bool>> = Vec::with_capacity(steps);
    let first: BTreeMap<String, bool> = c
        .points
        .iter()
        .map(|p| (p.clone(), c.start(p)))
        .collect();
    history.push(first);
    for t in 2..=steps {
        let mut row = BTreeMap::new();
        for p in &c.points {
            let v = match c.gates.get(p) {
                None => c.start(p),
                Some(g) => {
                    if t <= g.delay {
                        c.start(p)
                    } else {
                        g.expr.eval(&history[t - g.delay - 1])
                    }
                }
            };
            row.insert(p.clone(), v);
        }
        history.push(row);
    }
    Ok(history
        .iter()
        .map(|row| c.points.iter().map(|p| row[p]).collect())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn n(s: &str) -> NodeId {
        NodeId::new(s)
    }

    fn tweety() -> Diagram {
        Diagram::parse_arrows(&["a -> b", "a -> c", "c -> b", "b -> d", "c !> d"])
    }

    fn nixon() -> Diagram {
        Diagram::parse_arrows(&["a -> b", "a -> c", "b -> d", "c !> d"])
    }

    fn updown() -> Diagram {
        Diagram::parse_arrows(&[
            "z -> u", "z !> x", "u -> v", "u -> x", "x -> v", "x !> y", "v -> y",
        ])
    }

    fn splittotal() -> Diagram {
        Diagram::parse_arrows(&[
            "u -> x", "u -> v", "u !> w", "x -> w", "w -> v", "v -> y", "x !> y",
        ])
    }

    fn inheruniv() -> Diagram {
        Diagram::parse_arrows(&[
            "x -> a", "x -> c", "a -> y", "c -> y", "b !> y", "b -> d", "d -> a", "b -> f",
            "f !> a", "c -> e", "c -> g", "e -> b", "e -> g", "g !> b",
        ])
    }

    fn named() -> Vec<Diagram> {
        vec![tweety(), nixon(), updown(), splittotal(), inheruniv()]
    }

    fn dbl(trigger: &str, blocked: &str) -> DoubleArrow {
        DoubleArrow {
            trigger: Arrow::from(trigger),
            blocked: Arrow::from(blocked),
        }
    }

    fn assert_traversal_matches(d: &Diagram) {
        let vs = valid_paths(d, Mode::OffPathSplit).unwrap();
        for o in d.nodes() {
            let r = compile(d, o).unwrap();
            let walked = r.traverse();
            let expect: BTreeSet<Path> = vs.from_origin(o).cloned().collect();
            assert_eq!(walked, expect, "origin {o} of {d:?}");
        }
    }

    #[test]
    fn compile_unknown_origin() {
        assert!(matches!(
            compile(&tweety(), &n("zz")),
            Err(ReactiveError::Infer(InferError::Net(
                NetError::UnknownNode(_)
            )))
        ));
    }

    #[test]
    fn conflict_free_chain_has_no_doubles() {
        let d = Diagram::parse_arrows(&["a -> b", "b -> c"]);
        let r = compile(&d, &n("a")).unwrap();
        assert_eq!(r.doubles().count(), 0);
    }

    #[test]
    fn inheruniv_doubles_for_origin_c() {
        let r = compile(&inheruniv(), &n("c")).unwrap();
        let got: BTreeSet<DoubleArrow> = r.doubles().cloned().collect();
        let expect: BTreeSet<DoubleArrow> = [
            dbl("c -> e", "g !> b"),
            dbl("c -> g", "g !> b"),
            dbl("c -> e", "b !> y"),
            dbl("c -> e", "d -> a"),
            dbl("c -> e", "f !> a"),
        ]
        .into_iter()
        .collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn inheruniv_doubles_for_origin_x() {
        let r = compile(&inheruniv(), &n("x")).unwrap();
        let got: BTreeSet<DoubleArrow> = r.doubles().cloned().collect();
        let expect: BTreeSet<DoubleArrow> = [
            dbl("x -> c", "g !> b"),
            dbl("x -> c", "b !> y"),
            dbl("x -> c", "d -> a"),
            dbl("x -> c", "f !> a"),
        ]
        .into_iter()
        .collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn updown_blocks_final_arrow_only_from_u() {
        let from_u = compile(&updown(), &n("u")).unwrap();
        let got: BTreeSet<DoubleArrow> = from_u.doubles().cloned().collect();
        let expect: BTreeSet<DoubleArrow> =
            [dbl("u -> v", "v -> y"), dbl("u -> x", "v -> y")]
                .into_iter()
                .collect();
        assert_eq!(got, expect);
        // From z the chain through v stays free.
        let from_z = compile(&updown(), &n("z")).unwrap();
        assert!(!from_z.doubles().any(|d| d.blocked == Arrow::from("v -> y")));
    }

    #[test]
    fn traversal_equals_valid_paths_on_named_diagrams() {
        for d in named() {
            assert_traversal_matches(&d);
        }
    }

    #[test]
    fn recompile_is_identity_on_compiled_graphs() {
        for (d, o) in [(tweety(), "a"), (inheruniv(), "x"), (nixon(), "a")] {
            let r = compile(&d, &n(o)).unwrap();
            assert_eq!(recompile_fixpoint(&r), r);
        }
    }

    #[test]
    fn erasing_doubles_recovers_base() {
        for d in named() {
            for o in d.nodes() {
                let r = compile(&d, o).unwrap();
                assert_eq!(r.erase_doubles(), d);
            }
        }
    }

    #[test]
    fn memo_labels_named_pairs() {
        let t = memo_labels(&tweety());
        assert_eq!(t[&(n("a"), n("d"))], PairLabel::ValidNegative);
        assert_eq!(t[&(n("a"), n("b"))], PairLabel::ValidPositive);
        let x = memo_labels(&nixon());
        assert_eq!(x[&(n("a"), n("d"))], PairLabel::None);
        let iso = memo_labels(&Diagram::new([n("p"), n("q")], Vec::<Arrow>::new()).unwrap());
        assert_eq!(iso[&(n("p"), n("q"))], PairLabel::None);
    }

    #[test]
    fn memo_labels_agree_with_conclude() {
        for d in named() {
            let m = memo_labels(&d);
            for ((x, y), label) in &m {
                let v = conclude(&d, x, y, Mode::OffPathSplit).unwrap();
                let expect = match v {
                    Verdict::Positive => PairLabel::ValidPositive,
                    Verdict::Negative => PairLabel::ValidNegative,
                    Verdict::Undefined => PairLabel::None,
                };
                assert_eq!(*label, expect, "pair ({x},{y}) of {d:?}");
            }
        }
    }

    #[test]
    fn inheruniv_signposts() {
        let got = signposts(&inheruniv(), &n("x"), &n("y")).unwrap();
        let expect: BTreeSet<Arrow> = [Arrow::from("c -> e"), Arrow::from("c -> g")]
            .into_iter()
            .collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn tweety_signposts_mark_detours() {
        let got = signposts(&tweety(), &n("a"), &n("d")).unwrap();
        let expect: BTreeSet<Arrow> = [Arrow::from("a -> b"), Arrow::from("c -> b")]
            .into_iter()
            .collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn chain_has_no_signposts() {
        let d = Diagram::parse_arrows(&["a -> b", "b -> c"]);
        assert!(signposts(&d, &n("a"), &n("c")).unwrap().is_empty());
    }

    #[test]
    fn undefined_verdict_refuses_signposts() {
        assert!(matches!(
            signposts(&nixon(), &n("a"), &n("d")),
            Err(ReactiveError::NoValidPath(_, _))
        ));
    }

    // --- gate circuits -------------------------------------------------

    const POINTS: [&str; 8] = ["In1", "In2", "A1", "A2", "A3", "A4", "Out1", "Out2"];

    /// The feedback circuit: a variant of a JK flip-flop whose behaviour
    /// depends on the AND-gate delay.
    fn flipflop(and_delay: usize) -> GateCircuit {
        use GateExpr as E;
        let gates: BTreeMap<String, Gate> = [
            ("A1", E::and(E::point("In1"), E::point("Out1")), and_delay),
            ("A2", E::and(E::point("In2"), E::point("Out2")), and_delay),
            ("A3", E::or(E::point("A1"), E::point("Out2")), 1),
            ("A4", E::or(E::point("A2"), E::point("Out1")), 1),
            ("Out1", E::not(E::point("A3")), 1),
            ("Out2", E::not(E::point("A4")), 1),
        ]
        .into_iter()
        .map(|(p, expr, delay)| (p.to_string(), Gate { expr, delay }))
        .collect();
        let initial = [("In1", true), ("In2", false)]
            .into_iter()
            .map(|(p, v)| (p.to_string(), v))
            .collect();
        GateCircuit::new(POINTS.iter().map(|p| p.to_string()).collect(), gates, initial)
            .unwrap()
    }

    fn rows(spec: &[&str]) -> Vec<Vec<bool>> {
        spec.iter()
            .map(|r| r.chars().map(|c| c == 'T').collect())
            .collect()
    }

    #[test]
    fn unit_delay_circuit_oscillates_with_period_four() {
        let table = simulate_circuit(&flipflop(1), 9).unwrap();
        // Columns: In1 In2 A1 A2 A3 A4 Out1 Out2.
        let expect = rows(&[
            "TFFFFFFF", "TFFFFFTT", "TFTFTTTT", "TFTFTTFF", "TFFFTFFF", "TFFFFFFT", "TFFFTFTT",
            "TFTFTTFT", "TFFFTFFF",
        ]);
        assert_eq!(table, expect);
        assert_eq!(table[8], table[4]);
    }

    #[test]
    fn slow_and_gates_reach_a_stable_state() {
        let table = simulate_circuit(&flipflop(2), 8).unwrap();
        let expect = rows(&[
            "TFFFFFFF", "TFFFFFTT", "TFFFTTTT", "TFTFTTFF", "TFTFTFFF", "TFFFTFFT", "TFFFTFFT",
            "TFFFTFFT",
        ]);
        assert_eq!(table, expect);
        let stable: Vec<bool> = "TFFFTFFT".chars().map(|c| c == 'T').collect();
        assert_eq!(table[5], stable);
    }

    #[test]
    fn gateless_circuit_repeats_initial_row() {
        let c = GateCircuit::new(
            vec!["p".into(), "q".into()],
            BTreeMap::new(),
            [("p".to_string(), true), ("q".to_string(), false)]
                .into_iter()
                .collect(),
        )
        .unwrap();
        let table = simulate_circuit(&c, 3).unwrap();
        assert_eq!(table, vec![vec![true, false]; 3]);
    }

    #[test]
    fn undriven_point_rejected() {
        let err = GateCircuit::new(vec!["p".into()], BTreeMap::new(), BTreeMap::new());
        assert_eq!(err, Err(ReactiveError::UndrivenPoint("p".into())));
    }

    #[test]
    fn circuit_is_deterministic() {
        let a = simulate_circuit(&flipflop(2), 8).unwrap();
        let b = simulate_circuit(&flipflop(2), 8).unwrap();
        assert_eq!(a, b);
    }

    // --- randomized equivalence ---------------------------------------

    prop_compose! {
        /// A random acyclic diagram: arrows only go from lower to higher
        /// node index, so the result is a DAG with no hard contradictions.
        fn small_dag()(n in 2usize..7, picks in proptest::collection::btree_map(
            (0usize..6, 0usize..6), proptest::bool::ANY, 0..12,
        )) -> Diagram {
            let names: Vec<String> = (0..n).map(|i| format!("n{i}")).collect();
            // Re-keying after the modulus keeps one sign per node pair,
            // so no hard contradictions can arise.
            let mut chosen: BTreeMap<(usize, usize), bool> = BTreeMap::new();
            for ((i, j), pos) in picks {
                let (i, j) = (i % n, j % n);
                if i < j {
                    chosen.insert((i, j), pos);
                }
            }
            let arrows = chosen.into_iter().map(|((i, j), pos)| {
                let a = NodeId::new(names[i].clone());
                let b = NodeId::new(names[j].clone());
                if pos { Arrow::positive(a, b) } else { Arrow::negative(a, b) }
            });
            Diagram::new(names.iter().map(|s| NodeId::new(s.clone())), arrows).unwrap()
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn traversal_matches_valid_paths(d in small_dag()) {
            assert_traversal_matches(&d);
        }

        #[test]
        fn compile_is_idempotent(d in small_dag()) {
            for o in d.nodes() {
                let r = compile(&d, o).unwrap();
                prop_assert_eq!(recompile_fixpoint(&r), r);
            }
        }

        #[test]
        fn memo_verdicts_match_conclude(d in small_dag()) {
            let m = memo_labels(&d);
            for ((x, y), label) in &m {
                let v = conclude(&d, x, y, Mode::OffPathSplit).unwrap();
                let expect = match v {
                    Verdict::Positive => PairLabel::ValidPositive,
                    Verdict::Negative => PairLabel::ValidNegative,
                    Verdict::Undefined => PairLabel::None,
                };
                prop_assert_eq!(*label, expect);
            }
        }
    }
}
