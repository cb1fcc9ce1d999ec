//! Validity of paths in an inheritance diagram.
//!
//! A direct link is always valid.  A compound path `σ = σ′ ∘ (u → y)` from
//! `x` is valid iff
//!
//! 1. `σ′` is valid and the final arrow is in the diagram,
//! 2. no contradicting arrow `v !> y` is backed by more specific
//!    information: there are no valid positive paths `τ: x ⋯ v` (possibly
//!    empty, i.e. `v = x`) and `τ′: v ⋯ u`, and
//! 3. every contradicting arrow `v !> y` that is reachable by a valid
//!    positive path from `x` is itself beaten by a more specific
//!    agreeing source: some `z` with `z → y`, `z = x` or reachable from
//!    `x`, and a valid positive path `z ⋯ v`.
//!
//! (Dually for negative endings.)  Condition 2 comes in three flavours,
//! selected by [`Mode`]: the default checks the two witness paths
//! separately (split), [`Mode::OnPath`] only looks for contradicting
//! arrows leaving the path itself, and [`Mode::TotalValidity`] requires
//! the concatenated witness `τ ∘ τ′` to be valid as one path (and likewise
//! for the witnesses of condition 3).  [`Mode::Extensions`] replaces the
//! sceptical condition 3 by branching: each unresolved conflict is decided
//! both ways, yielding a set of extensions.
//!
//! The module also houses the big-set derivation engine, an independent
//! route to the same conclusions that reasons about "most X are Y" as
//! relative size judgments between reference classes.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::net::{Diagram, NetError, NodeId, Path, PathKind, Polarity};

/// Variant of the validity definition.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Default)]
pub enum Mode {
    /// Preclusion witnesses validated separately (the default).
    #[default]
    OffPathSplit,
    /// Preclusion only by contradicting arrows leaving the path itself.
    OnPath,
    /// Preclusion witnesses must concatenate to one valid path.
    TotalValidity,
    /// Branch on unresolved conflicts instead of cancelling them.
    Extensions,
}

/// Outcome of a conclusion query.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Verdict {
    Positive,
    Negative,
    Undefined,
}

impl From<Polarity> for Verdict {
    fn from(p: Polarity) -> Self {
        match p {
            Polarity::Positive => Verdict::Positive,
            Polarity::Negative => Verdict::Negative,
        }
    }
}

/// Arbitration rule between conflicting information sources.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum Plugin {
    /// A source is eliminated only when a better source contradicts it
    /// (the default, used by all acceptance-level semantics).
    #[default]
    EliminateOnContradiction,
    /// A source is eliminated whenever any better source exists.
    EliminateOnAnyBetter,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct InferConfig {
    pub plugin: Plugin,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum InferError {
    #[error("mode {0:?} not supported here; use the extensions operation")]
    ModeError(Mode),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error("validity induction failed to decide {0}")]
    Undecided(Path),
}

/// The set of valid paths of a diagram under one mode (and, for
/// extension semantics, one branch of conflict resolutions).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct ValidSet {
    mode: Mode,
    paths: BTreeSet<Path>,
}

impl ValidSet {
    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn paths(&self) -> impl Iterator<Item = &Path> {
        self.paths.iter()
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn contains(&self, p: &Path) -> bool {
        self.paths.contains(p)
    }

    /// Valid paths from `x` to `y` with the given overall sign.
    pub fn between<'a>(
        &'a self,
        x: &'a NodeId,
        y: &'a NodeId,
        polarity: Polarity,
    ) -> impl Iterator<Item = &'a Path> {
        self.paths.iter().filter(move |p| {
            p.origin() == x && p.endpoint() == y && p.polarity() == polarity
        })
    }

    /// Valid paths starting at `x`.
    pub fn from_origin<'a>(&'a self, x: &'a NodeId) -> impl Iterator<Item = &'a Path> {
        self.paths.iter().filter(move |p| p.origin() == x)
    }

    fn assert_prefix_closed(&self) {
        for p in &self.paths {
            for q in p.strict_prefixes() {
                debug_assert!(
                    self.paths.contains(&q),
                    "valid set not closed under prefixes: {p} without {q}"
                );
            }
        }
    }
}

/// Three-valued truth for the saturation: `None` is "not yet decided".
type Tri = Option<bool>;

fn and3(a: Tri, b: Tri) -> Tri {
    match (a, b) {
        (Some(false), _) | (_, Some(false)) => Some(false),
        (Some(true), Some(true)) => Some(true),
        _ => None,
    }
}

fn or3(a: Tri, b: Tri) -> Tri {
    match (a, b) {
        (Some(true), _) | (_, Some(true)) => Some(true),
        (Some(false), Some(false)) => Some(false),
        _ => None,
    }
}

fn not3(a: Tri) -> Tri {
    a.map(|b| !b)
}

fn any3<I: IntoIterator<Item = Tri>>(it: I) -> Tri {
    it.into_iter().fold(Some(false), or3)
}

struct Engine<'a> {
    d: &'a Diagram,
    mode: Mode,
    plugin: Plugin,
    /// Status of every potential path of the diagram (all origins).
    status: BTreeMap<Path, Tri>,
    /// Potential positive paths indexed by (origin, endpoint).
    positive: BTreeMap<(NodeId, NodeId), Vec<Path>>,
    /// Conflict resolutions fixed by the current extension branch.
    resolution: BTreeMap<(NodeId, NodeId), Polarity>,
    /// Pairs whose conflicts are unresolved in this branch.
    pending: BTreeSet<(NodeId, NodeId)>,
}

impl<'a> Engine<'a> {
    fn new(
        d: &'a Diagram,
        mode: Mode,
        plugin: Plugin,
        resolution: BTreeMap<(NodeId, NodeId), Polarity>,
    ) -> Self {
        let mut status = BTreeMap::new();
        let mut positive: BTreeMap<(NodeId, NodeId), Vec<Path>> = BTreeMap::new();
        let nodes: Vec<NodeId> = d.nodes().cloned().collect();
        for x in &nodes {
            for y in &nodes {
                if x == y {
                    continue;
                }
                for p in d.potential_paths(x, y).expect("nodes exist") {
                    if p.kind() == PathKind::PotentialPositive {
                        positive
                            .entry((x.clone(), y.clone()))
                            .or_default()
                            .push(p.clone());
                    }
                    let init = if p.len() == 1 { Some(true) } else { None };
                    status.insert(p, init);
                }
            }
        }
        Engine {
            d,
            mode,
            plugin,
            status,
            positive,
            resolution,
            pending: BTreeSet::new(),
        }
    }

    /// Is some valid positive path from `p` to `q` known / excluded?
    fn reach(&self, p: &NodeId, q: &NodeId) -> Tri {
        match self.positive.get(&(p.clone(), q.clone())) {
            None => Some(false),
            Some(paths) => any3(paths.iter().map(|t| self.status[t])),
        }
    }

    /// `reach` allowing the empty path when `p == q`.
    fn access(&self, p: &NodeId, q: &NodeId) -> Tri {
        if p == q {
            Some(true)
        } else {
            self.reach(p, q)
        }
    }

    /// Is some valid positive path from `p` to `q` *through* `via` known?
    /// (`via = p` or `via = q` is trivially on every such path.)
    fn reach_through(&self, p: &NodeId, q: &NodeId, via: &NodeId) -> Tri {
        match self.positive.get(&(p.clone(), q.clone())) {
            None => Some(false),
            Some(paths) => any3(
                paths
                    .iter()
                    .filter(|t| t.nodes().any(|n| n == via))
                    .map(|t| self.status[t]),
            ),
        }
    }

    /// Sources of arrows into `y` with the given polarity.
    fn arrow_sources(&self, y: &NodeId, polarity: Polarity) -> Vec<NodeId> {
        self.d
            .in_arrows(y)
            .filter(|a| a.polarity == polarity)
            .map(|a| a.source.clone())
            .collect()
    }

    /// Condition 2: no preclusion against `σ` by a contradicting arrow
    /// backed by more specific information.
    fn no_preclusion(&self, sigma: &Path) -> Tri {
        let x = sigma.origin();
        let y = sigma.endpoint();
        let u = &sigma.last().source;
        let opp = sigma.polarity().flip();
        let precluded = match self.mode {
            Mode::OnPath => {
                // Only nodes on the path itself can carry the
                // contradicting arrow; no witness paths involved.
                let on_path = sigma
                    .prefix()
                    .expect("compound path")
                    .nodes()
                    .any(|v| self.d.has_arrow(v, y, opp));
                Some(on_path)
            }
            Mode::TotalValidity => any3(self.arrow_sources(y, opp).iter().map(|v| {
                // The concatenated witness x ⋯ v ⋯ u must be valid as
                // one path (v = x degenerates to any valid x ⋯ u path).
                self.reach_through(x, u, v)
            })),
            Mode::OffPathSplit | Mode::Extensions => {
                any3(self.arrow_sources(y, opp).iter().map(|v| {
                    and3(self.access(x, v), self.reach(v, u))
                }))
            }
        };
        not3(precluded)
    }

    /// Is the contradicting source `v` beaten by a more specific agreeing
    /// source `z`?
    fn beaten(&self, sigma: &Path, v: &NodeId) -> Tri {
        let x = sigma.origin();
        let y = sigma.endpoint();
        let zs: Vec<NodeId> = match self.plugin {
            Plugin::EliminateOnContradiction => self.arrow_sources(y, sigma.polarity()),
            Plugin::EliminateOnAnyBetter => {
                let mut zs = self.arrow_sources(y, Polarity::Positive);
                zs.extend(self.arrow_sources(y, Polarity::Negative));
                zs
            }
        };
        // A direct link x -> y defends its own validity and defeats
        // opposing compounds (condition 2), but it does not rescue other
        // compound paths: the beating source must itself be reached by a
        // nonempty valid path.  Hence z != x below.
        any3(zs.iter().filter(|z| *z != v && *z != x).map(|z| {
            match self.mode {
                Mode::TotalValidity => self.reach_through(x, v, z),
                _ => and3(self.access(x, z), self.reach(z, v)),
            }
        }))
    }

    /// Condition 3: every reachable contradicting source is beaten.
    /// Returns the list of definitely-unbeaten reachable sources as well,
    /// which drives conflict branching in extension mode.
    fn conflicts_cancelled(&self, sigma: &Path) -> (Tri, bool) {
        let x = sigma.origin();
        let y = sigma.endpoint();
        let opp = sigma.polarity().flip();
        let mut value = Some(true);
        let mut definite_conflict = false;
        for v in self.arrow_sources(y, opp) {
            let av = self.access(x, &v);
            let b = self.beaten(sigma, &v);
            if av == Some(true) && b == Some(false) {
                definite_conflict = true;
            }
            value = and3(value, or3(not3(av), b));
        }
        (value, definite_conflict)
    }

    fn eval(&mut self, sigma: &Path) -> Tri {
        debug_assert!(sigma.len() > 1);
        let cond1 = self.status[&sigma.prefix().expect("compound path")];
        if cond1 == Some(false) {
            return Some(false);
        }
        let cond2 = self.no_preclusion(sigma);
        if cond2 == Some(false) {
            return Some(false);
        }
        let (cond3, definite_conflict) = self.conflicts_cancelled(sigma);
        if self.mode == Mode::Extensions {
            let pair = (sigma.origin().clone(), sigma.endpoint().clone());
            if let Some(&side) = self.resolution.get(&pair) {
                // The branch has already decided this pair: agreeing
                // candidates that survive conditions 1-2 are valid, the
                // others are cancelled.
                let agree = Some(sigma.polarity() == side);
                return and3(and3(cond1, cond2), agree);
            }
            if definite_conflict && and3(cond1, cond2) == Some(true) {
                self.pending.insert(pair);
                return None;
            }
        }
        and3(and3(cond1, cond2), cond3)
    }

    fn saturate(&mut self) {
        loop {
            let mut changed = false;
            self.pending.clear();
            let undecided: Vec<Path> = self
                .status
                .iter()
                .filter(|(_, s)| s.is_none())
                .map(|(p, _)| p.clone())
                .collect();
            for p in undecided {
                let v = self.eval(&p);
                if v.is_some() {
                    self.status.insert(p, v);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
    }

    fn valid_set(&self) -> ValidSet {
        let paths = self
            .status
            .iter()
            .filter(|(_, s)| **s == Some(true))
            .map(|(p, _)| p.clone())
            .collect();
        let vs = ValidSet {
            mode: self.mode,
            paths,
        };
        vs.assert_prefix_closed();
        vs
    }

    fn first_undecided(&self) -> Option<&Path> {
        self.status
            .iter()
            .find(|(_, s)| s.is_none())
            .map(|(p, _)| p)
    }
}

/// All valid paths of the diagram under a sceptical mode.
pub fn valid_paths(d: &Diagram, mode: Mode) -> Result<ValidSet, InferError> {
    valid_paths_with(d, mode, InferConfig::default())
}

pub fn valid_paths_with(d: &Diagram, mode: Mode, cfg: InferConfig) -> Result<ValidSet, InferError> {
    if mode == Mode::Extensions {
        return Err(InferError::ModeError(mode));
    }
    let mut engine = Engine::new(d, mode, cfg.plugin, BTreeMap::new());
    engine.saturate();
    if let Some(p) = engine.first_undecided() {
        return Err(InferError::Undecided(p.clone()));
    }
    Ok(engine.valid_set())
}

/// All extensions: each branch decides every unresolved conflict one way.
pub fn extensions(d: &Diagram) -> Vec<ValidSet> {
    extensions_with(d, InferConfig::default())
}

pub fn extensions_with(d: &Diagram, cfg: InferConfig) -> Vec<ValidSet> {
    let mut found: BTreeSet<BTreeSet<Path>> = BTreeSet::new();
    let mut out: Vec<ValidSet> = Vec::new();
    let mut stack: Vec<BTreeMap<(NodeId, NodeId), Polarity>> = vec![BTreeMap::new()];
    while let Some(resolution) = stack.pop() {
        let mut engine = Engine::new(d, Mode::Extensions, cfg.plugin, resolution.clone());
        engine.saturate();
        if engine.pending.is_empty() {
            debug_assert!(engine.first_undecided().is_none());
            let vs = engine.valid_set();
            if found.insert(vs.paths.clone()) {
                out.push(vs);
            }
            continue;
        }
        // Branch on the least unresolved conflict, ordered by
        // (target, source); negative pushed first so the positive branch
        // is explored (and reported) first.
        let (x, y) = engine
            .pending
            .iter()
            .min_by_key(|(x, y)| (y.clone(), x.clone()))
            .expect("nonempty")
            .clone();
        for side in [Polarity::Negative, Polarity::Positive] {
            let mut r = resolution.clone();
            r.insert((x.clone(), y.clone()), side);
            stack.push(r);
        }
    }
    out
}

/// Verdict for the pair `(x, y)` in the given mode.
pub fn conclude(d: &Diagram, x: &NodeId, y: &NodeId, mode: Mode) -> Result<Verdict, InferError> {
    conclude_with(d, x, y, mode, InferConfig::default())
}

pub fn conclude_with(
    d: &Diagram,
    x: &NodeId,
    y: &NodeId,
    mode: Mode,
    cfg: InferConfig,
) -> Result<Verdict, InferError> {
    for n in [x, y] {
        if !d.has_node(n) {
            return Err(NetError::UnknownNode(n.clone()).into());
        }
    }
    if mode == Mode::Extensions {
        let exts = extensions_with(d, cfg);
        let verdicts: BTreeSet<_> = exts
            .iter()
            .map(|vs| pair_verdict(vs, x, y))
            .map(verdict_key)
            .collect();
        if verdicts.len() == 1 {
            return Ok(key_verdict(*verdicts.first().unwrap()));
        }
        return Ok(Verdict::Undefined);
    }
    let vs = valid_paths_with(d, mode, cfg)?;
    Ok(pair_verdict(&vs, x, y))
}

fn pair_verdict(vs: &ValidSet, x: &NodeId, y: &NodeId) -> Verdict {
    let pos = vs.between(x, y, Polarity::Positive).next().is_some();
    let neg = vs.between(x, y, Polarity::Negative).next().is_some();
    match (pos, neg) {
        (true, false) => Verdict::Positive,
        (false, true) => Verdict::Negative,
        _ => Verdict::Undefined,
    }
}

fn verdict_key(v: Verdict) -> u8 {
    match v {
        Verdict::Positive => 0,
        Verdict::Negative => 1,
        Verdict::Undefined => 2,
    }
}

fn key_verdict(k: u8) -> Verdict {
    match k {
        0 => Verdict::Positive,
        1 => Verdict::Negative,
        _ => Verdict::Undefined,
    }
}

/// Conclusions derived by the big-set engine.
///
/// Each arrow `v -> z` asserts that the `z`-normal part of `v` is a very
/// big subset of `v` (and dually for `v !> z`).  A node `x` inherits
/// `z`-information from every source `v` carrying a direct `z`-arrow such
/// that the engine has already derived "most of `x` is in `v`".  The
/// sources are arbitrated at the most specific reference class (their
/// intersection): a source is eliminated when a contradicting source is
/// derivably more specific.  Surviving unanimous sources transfer their
/// judgment down to `x`.
pub fn bigset_conclusions(d: &Diagram) -> BTreeSet<(NodeId, NodeId, Polarity)> {
    bigset_conclusions_with(d, InferConfig::default())
}

pub fn bigset_conclusions_with(
    d: &Diagram,
    cfg: InferConfig,
) -> BTreeSet<(NodeId, NodeId, Polarity)> {
    let order = d.topological_order();
    let mut verdicts: BTreeMap<(NodeId, NodeId), Polarity> = BTreeMap::new();
    // "most of p is in q" is already derived
    let derived_in = |verdicts: &BTreeMap<(NodeId, NodeId), Polarity>, p: &NodeId, q: &NodeId| {
        p != q && verdicts.get(&(p.clone(), q.clone())) == Some(&Polarity::Positive)
    };
    for z in &order {
        for x in &order {
            if x == z {
                continue;
            }
            // Sources: direct z-information accessible from x.
            let sources: Vec<(NodeId, Polarity)> = d
                .in_arrows(z)
                .filter(|a| a.source == *x || derived_in(&verdicts, x, &a.source))
                .map(|a| (a.source.clone(), a.polarity))
                .collect();
            if sources.is_empty() {
                continue;
            }
            let survivors: Vec<&(NodeId, Polarity)> = sources
                .iter()
                .filter(|(v, pol)| {
                    !sources.iter().any(|(w, wpol)| {
                        let contradicts = match cfg.plugin {
                            Plugin::EliminateOnContradiction => wpol != pol,
                            Plugin::EliminateOnAnyBetter => true,
                        };
                        w != v && contradicts && (w == x || derived_in(&verdicts, w, v))
                    })
                })
                .collect();
            let signs: BTreeSet<Polarity> = survivors.iter().map(|(_, p)| *p).collect();
            if signs.len() == 1 {
                verdicts.insert((x.clone(), z.clone()), *signs.first().unwrap());
            }
        }
    }
    verdicts
        .into_iter()
        .map(|((x, z), p)| (x, z, p))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

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

    fn shown(vs: &ValidSet) -> Vec<String> {
        vs.paths().map(|p| p.to_string()).collect()
    }

    #[test]
    fn tweety_split_valid_paths() {
        let vs = valid_paths(&tweety(), Mode::OffPathSplit).unwrap();
        assert!(shown(&vs).contains(&"a -> c !> d".to_string()));
        assert!(!shown(&vs).contains(&"a -> b -> d".to_string()));
        assert!(!shown(&vs).contains(&"a -> c -> b -> d".to_string()));
    }

    #[test]
    fn tweety_conclusion_negative() {
        let d = tweety();
        assert_eq!(
            conclude(&d, &n("a"), &n("d"), Mode::OffPathSplit).unwrap(),
            Verdict::Negative
        );
    }

    #[test]
    fn nixon_undefined() {
        let d = nixon();
        assert_eq!(
            conclude(&d, &n("a"), &n("d"), Mode::OffPathSplit).unwrap(),
            Verdict::Undefined
        );
    }

    #[test]
    fn nixon_two_extensions() {
        let d = nixon();
        let exts = extensions(&d);
        assert_eq!(exts.len(), 2);
        let pos = exts
            .iter()
            .filter(|e| shown(e).contains(&"a -> b -> d".to_string()))
            .count();
        let neg = exts
            .iter()
            .filter(|e| shown(e).contains(&"a -> c !> d".to_string()))
            .count();
        assert_eq!((pos, neg), (1, 1));
        assert_eq!(
            conclude(&d, &n("a"), &n("d"), Mode::Extensions).unwrap(),
            Verdict::Undefined
        );
    }

    #[test]
    fn tweety_single_extension_matches_split() {
        let d = tweety();
        let exts = extensions(&d);
        assert_eq!(exts.len(), 1);
        let split = valid_paths(&d, Mode::OffPathSplit).unwrap();
        assert_eq!(shown(&exts[0]), shown(&split));
    }

    #[test]
    fn conflict_free_chain_one_extension() {
        let d = Diagram::parse_arrows(&["a -> b", "b -> c"]);
        let exts = extensions(&d);
        assert_eq!(exts.len(), 1);
        assert_eq!(exts[0].len(), 3); // a->b, b->c, a->b->c
    }

    #[test]
    fn updown_chaining() {
        let d = updown();
        assert_eq!(
            conclude(&d, &n("z"), &n("y"), Mode::OffPathSplit).unwrap(),
            Verdict::Positive
        );
        assert_eq!(
            conclude(&d, &n("u"), &n("y"), Mode::OffPathSplit).unwrap(),
            Verdict::Negative
        );
        let vs = valid_paths(&d, Mode::OffPathSplit).unwrap();
        assert!(shown(&vs).contains(&"z -> u -> v -> y".to_string()));
    }

    #[test]
    fn split_vs_total_preclusion() {
        let d = splittotal();
        assert_eq!(
            conclude(&d, &n("u"), &n("y"), Mode::OffPathSplit).unwrap(),
            Verdict::Negative
        );
        assert_eq!(
            conclude(&d, &n("u"), &n("y"), Mode::TotalValidity).unwrap(),
            Verdict::Undefined
        );
    }

    #[test]
    fn direct_link_dominance() {
        let d = Diagram::parse_arrows(&["a -> b", "b -> c", "a !> c"]);
        for mode in [Mode::OffPathSplit, Mode::OnPath, Mode::TotalValidity] {
            assert_eq!(
                conclude(&d, &n("a"), &n("c"), mode).unwrap(),
                Verdict::Negative,
                "{mode:?}"
            );
        }
        assert_eq!(
            conclude(&d, &n("a"), &n("c"), Mode::Extensions).unwrap(),
            Verdict::Negative
        );
    }

    #[test]
    fn mode_error_for_extensions_valid_paths() {
        let err = valid_paths(&nixon(), Mode::Extensions).unwrap_err();
        assert!(matches!(err, InferError::ModeError(Mode::Extensions)));
    }

    #[test]
    fn onpath_mode_tweety() {
        // c sits on the path a -> c -> b -> d, so on-path preclusion also
        // cancels it; a -> b -> d has no contradicting node on the path
        // and survives in on-path mode, unlike in split mode.
        let vs = valid_paths(&tweety(), Mode::OnPath).unwrap();
        assert!(shown(&vs).contains(&"a -> c !> d".to_string()));
        assert!(!shown(&vs).contains(&"a -> c -> b -> d".to_string()));
    }

    #[test]
    fn bigset_tweety() {
        let got = bigset_conclusions(&tweety());
        let want: BTreeSet<(NodeId, NodeId, Polarity)> = [
            ("a", "b", Polarity::Positive),
            ("a", "c", Polarity::Positive),
            ("c", "b", Polarity::Positive),
            ("b", "d", Polarity::Positive),
            ("c", "d", Polarity::Negative),
            ("a", "d", Polarity::Negative),
        ]
        .into_iter()
        .map(|(x, y, p)| (n(x), n(y), p))
        .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn bigset_single_arrow() {
        let got = bigset_conclusions(&Diagram::parse_arrows(&["a -> b"]));
        assert_eq!(got.len(), 1);
        assert!(got.contains(&(n("a"), n("b"), Polarity::Positive)));
    }

    #[test]
    fn bigset_diagram_multiple() {
        // X -> Y, X -> Y', Y -> Z, Y' !> Z, Y' -> Y, U -> X, Y'' -> Z
        let d = Diagram::parse_arrows(&[
            "X -> Y",
            "X -> Yp",
            "Y -> Z",
            "Yp !> Z",
            "Yp -> Y",
            "U -> X",
            "Ypp -> Z",
        ]);
        let got = bigset_conclusions(&d);
        assert!(got.contains(&(n("X"), n("Z"), Polarity::Negative)));
    }

    #[test]
    fn bigset_agrees_with_split_on_named_diagrams() {
        for d in [tweety(), nixon(), updown(), splittotal()] {
            let big = bigset_conclusions(&d);
            let nodes: Vec<NodeId> = d.nodes().cloned().collect();
            for x in &nodes {
                for y in &nodes {
                    if x == y {
                        continue;
                    }
                    let v = conclude(&d, x, y, Mode::OffPathSplit).unwrap();
                    let b = if big.contains(&(x.clone(), y.clone(), Polarity::Positive)) {
                        Verdict::Positive
                    } else if big.contains(&(x.clone(), y.clone(), Polarity::Negative)) {
                        Verdict::Negative
                    } else {
                        Verdict::Undefined
                    };
                    assert_eq!(v, b, "pair ({x}, {y})");
                }
            }
        }
    }
}
