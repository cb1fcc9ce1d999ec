//! Arrow structures where arrows can attack other arrows.
//!
//! A level-1 arrow runs from a copy to a copy; a level-(n+1) arrow runs
//! from a copy into a level-n arrow, attacking it.  Validity of an arrow
//! within a set of elements is decided by downward induction from the
//! top level: an arrow survives when every in-range attack on it is
//! itself attacked by a surviving arrow.  Choice picks the elements with
//! a copy no valid arrow reaches.  The module also decides the two
//! smoothness notions for such structures and builds two realizations:
//! a level-2 structure realizing an arbitrary restriction of a range
//! assignment, and a level-3 structure whose choice is stable under the
//! exchange of extension-equivalent sets.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use thiserror::Error;

use crate::choice::{check, CheckResult, ChoiceFunction, Elem, ElemSet, Property, Witness};
use crate::pref::{selection_range, selection_token, selections, CopyNode};

/// Deepest allowed attack nesting; structures past this are rejected.
pub const MAX_LEVEL: usize = 8;

pub type ArrowId = String;

/// What an arrow points at: a copy (level 1) or another arrow.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Target {
    Copy(CopyNode),
    Arrow(ArrowId),
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct HigherArrow {
    pub id: ArrowId,
    pub origin: CopyNode,
    pub target: Target,
}

impl HigherArrow {
    pub fn to_copy(id: impl Into<ArrowId>, origin: CopyNode, target: CopyNode) -> HigherArrow {
        HigherArrow { id: id.into(), origin, target: Target::Copy(target) }
    }

    pub fn to_arrow(
        id: impl Into<ArrowId>,
        origin: CopyNode,
        target: impl Into<ArrowId>,
    ) -> HigherArrow {
        HigherArrow { id: id.into(), origin, target: Target::Arrow(target.into()) }
    }
}

#[derive(Error, Clone, PartialEq, Eq, Debug)]
pub enum HigherError {
    #[error("duplicate arrow id {0}")]
    DuplicateArrow(ArrowId),
    #[error("arrow {0} references unknown arrow {1}")]
    UnknownArrow(ArrowId, ArrowId),
    #[error("arrow {0} touches copy {1} outside the structure")]
    UnknownCopy(ArrowId, String),
    #[error("arrow {0} exceeds the maximum nesting depth {MAX_LEVEL}")]
    LevelOverflow(ArrowId),
    #[error("construction precondition {property} fails at {witness}")]
    PreconditionFailed { property: String, witness: String },
}

/// A finite set of copies plus an attack-arrow graph over them.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GenStructure {
    nodes: BTreeSet<CopyNode>,
    arrows: BTreeMap<ArrowId, HigherArrow>,
    /// Arrow nesting depths, precomputed at construction.
    levels: BTreeMap<ArrowId, usize>,
}

impl GenStructure {
    pub fn new(
        nodes: impl IntoIterator<Item = CopyNode>,
        arrows: impl IntoIterator<Item = HigherArrow>,
    ) -> Result<GenStructure, HigherError> {
        let nodes: BTreeSet<CopyNode> = nodes.into_iter().collect();
        let mut map: BTreeMap<ArrowId, HigherArrow> = BTreeMap::new();
        for a in arrows {
            if map.insert(a.id.clone(), a.clone()).is_some() {
                return Err(HigherError::DuplicateArrow(a.id));
            }
        }
        for a in map.values() {
            if !nodes.contains(&a.origin) {
                return Err(HigherError::UnknownCopy(a.id.clone(), a.origin.to_string()));
            }
            match &a.target {
                Target::Copy(c) => {
                    if !nodes.contains(c) {
                        return Err(HigherError::UnknownCopy(a.id.clone(), c.to_string()));
                    }
                }
                Target::Arrow(t) => {
                    if !map.contains_key(t) {
                        return Err(HigherError::UnknownArrow(a.id.clone(), t.clone()));
                    }
                }
            }
        }
        // Nesting depth; a reference cycle never bottoms out and shows
        // up as depth past the cap.
        let mut levels: BTreeMap<ArrowId, usize> = BTreeMap::new();
        for id in map.keys() {
            let mut depth = 1;
            let mut cur = &map[id];
            while let Target::Arrow(t) = &cur.target {
                depth += 1;
                if depth > MAX_LEVEL {
                    return Err(HigherError::LevelOverflow(id.clone()));
                }
                cur = &map[t];
            }
            levels.insert(id.clone(), depth);
        }
        Ok(GenStructure { nodes, arrows: map, levels })
    }

    pub fn nodes(&self) -> &BTreeSet<CopyNode> {
        &self.nodes
    }

    pub fn arrows(&self) -> impl Iterator<Item = &HigherArrow> {
        self.arrows.values()
    }

    pub fn arrow(&self, id: &str) -> Option<&HigherArrow> {
        self.arrows.get(id)
    }

    pub fn level_of(&self, id: &str) -> Option<usize> {
        self.levels.get(id).copied()
    }

    pub fn level(&self) -> usize {
        self.levels.values().copied().max().unwrap_or(1)
    }

    /// The elements standing at the origin end of the arrow and of every
    /// arrow beneath it.
    pub fn origin_set(&self, id: &str) -> ElemSet {
        let mut out = ElemSet::new();
        let mut cur = &self.arrows[id];
        loop {
            out.insert(cur.origin.element().clone());
            match &cur.target {
                Target::Arrow(t) => cur = &self.arrows[t],
                Target::Copy(_) => return out,
            }
        }
    }

    /// The element the arrow chain finally points at.
    pub fn destination_set(&self, id: &str) -> ElemSet {
        let mut cur = &self.arrows[id];
        loop {
            match &cur.target {
                Target::Arrow(t) => cur = &self.arrows[t],
                Target::Copy(c) => return [c.element().clone()].into(),
            }
        }
    }

    fn attackers<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a HigherArrow> {
        self.arrows
            .values()
            .filter(move |a| matches!(&a.target, Target::Arrow(t) if t == id))
    }

    /// Shared downward induction for both validity notions.  `in_range`
    /// decides whether an arrow is eligible at all, `trigger` whether an
    /// attack on an eligible arrow counts.
    fn valid_set(
        &self,
        in_range: impl Fn(&HigherArrow) -> bool,
        trigger: impl Fn(&HigherArrow) -> bool,
    ) -> BTreeSet<ArrowId> {
        let mut valid: BTreeSet<ArrowId> = BTreeSet::new();
        for level in (1..=self.level()).rev() {
            for (id, a) in self.arrows.iter().filter(|(id, _)| self.levels[*id] == level) {
                let survives = in_range(a)
                    && self.attackers(id).all(|b| {
                        !trigger(b) || self.attackers(&b.id).any(|g| valid.contains(&g.id))
                    });
                if survives {
                    valid.insert(id.clone());
                }
            }
        }
        valid
    }

    /// Arrows that hold up inside `x` against `y`: origins within `x`,
    /// destinations within `y`, every attack from `x` countered by a
    /// surviving arrow.
    pub fn valid_within(&self, x: &ElemSet, y: &ElemSet) -> BTreeSet<ArrowId> {
        self.valid_set(
            |a| self.origin_set(&a.id).is_subset(x) && self.destination_set(&a.id).is_subset(y),
            |b| x.contains(b.origin.element()),
        )
    }

    /// Arrows rooted in `x` that hold up against attacks from the wider
    /// `y` (counters must again be rooted in `x`).
    pub fn valid_rooted(&self, x: &ElemSet, y: &ElemSet) -> BTreeSet<ArrowId> {
        self.valid_set(
            |a| {
                x.contains(a.origin.element())
                    && self.origin_set(&a.id).is_subset(y)
                    && self.destination_set(&a.id).is_subset(y)
            },
            |b| y.contains(b.origin.element()),
        )
    }

    /// The elements of `range` with a copy that no arrow surviving
    /// within `x` (against `range`) reaches.
    pub fn chosen_relative(&self, x: &ElemSet, range: &ElemSet) -> ElemSet {
        let valid = self.valid_within(x, range);
        range
            .iter()
            .filter(|e| {
                self.nodes.iter().filter(|n| n.element() == *e).any(|n| {
                    !valid.iter().any(|id| self.arrows[id].target == Target::Copy((*n).clone()))
                })
            })
            .cloned()
            .collect()
    }

    /// The chosen elements of `x`: those with a copy out of reach of
    /// every arrow surviving within `x`.
    pub fn higher_mu(&self, x: &ElemSet) -> ElemSet {
        self.chosen_relative(x, x)
    }
}

fn pass() -> CheckResult {
    CheckResult { holds: true, witness: None }
}

fn fail(sets: Vec<ElemSet>, elems: Vec<Elem>) -> CheckResult {
    CheckResult { holds: false, witness: Some(Witness { sets, elems }) }
}

/// Does `x` sit under `xp` the way a choice sits under its set: every
/// copy of an outside element reached by an arrow rooted in `x`, and
/// each element of `x` keeping one copy all of whose in-range attacks
/// are countered by arrows rooted in `x`?
pub fn check_sqsubseteq(s: &GenStructure, x: &ElemSet, xp: &ElemSet) -> CheckResult {
    if !x.is_subset(xp) {
        return fail(vec![x.clone(), xp.clone()], vec![]);
    }
    let valid = s.valid_rooted(x, xp);
    let reaches = |id: &ArrowId, n: &CopyNode| s.arrows[id].target == Target::Copy(n.clone());
    for e in xp.difference(x) {
        for n in s.nodes().iter().filter(|n| n.element() == e) {
            if !valid.iter().any(|id| reaches(id, n)) {
                return fail(vec![x.clone(), xp.clone()], vec![n.to_string()]);
            }
        }
    }
    for e in x {
        let safe_copy = s.nodes().iter().filter(|n| n.element() == e).any(|n| {
            s.arrows.values().all(|a| {
                a.target != Target::Copy((*n).clone())
                    || !xp.contains(a.origin.element())
                    || s.arrows
                        .values()
                        .any(|b| b.target == Target::Arrow(a.id.clone()) && valid.contains(&b.id))
            })
        });
        if !safe_copy {
            return fail(vec![x.clone(), xp.clone()], vec![e.clone()]);
        }
    }
    pass()
}

/// Total smoothness over a family of sets: every arrow lying in a set
/// has a parallel arrow (same destination) starting at a chosen
/// element, and validly so when the arrow itself is valid.
pub fn totally_smooth<'a>(
    s: &GenStructure,
    domain: impl IntoIterator<Item = &'a ElemSet>,
) -> CheckResult {
    for x in domain {
        let mu = s.higher_mu(x);
        let valid = s.valid_within(x, x);
        for a in s.arrows() {
            let in_set: ElemSet = s
                .origin_set(&a.id)
                .union(&s.destination_set(&a.id))
                .cloned()
                .collect();
            if !in_set.is_subset(x) {
                continue;
            }
            let parallels: Vec<&HigherArrow> = s
                .arrows()
                .filter(|b| b.target == a.target && mu.contains(b.origin.element()))
                .collect();
            if parallels.is_empty() {
                return fail(vec![x.clone()], vec![a.id.clone()]);
            }
            if valid.contains(&a.id) && !parallels.iter().any(|b| valid.contains(&b.id)) {
                return fail(vec![x.clone()], vec![a.id.clone()]);
            }
        }
    }
    pass()
}

/// Essential smoothness over a family: the choice of each set sits
/// under the set in the `check_sqsubseteq` sense.
pub fn essentially_smooth<'a>(
    s: &GenStructure,
    domain: impl IntoIterator<Item = &'a ElemSet>,
) -> CheckResult {
    for x in domain {
        let res = check_sqsubseteq(s, &s.higher_mu(x), x);
        if !res.holds {
            return res;
        }
    }
    pass()
}

/// A range assignment and the restriction of it to realize: for each
/// domain set, `eta` names the candidates and `rho` the survivors.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AttackPair {
    eta: BTreeMap<ElemSet, ElemSet>,
    rho: BTreeMap<ElemSet, ElemSet>,
    universe: ElemSet,
}

impl AttackPair {
    pub fn new(
        universe: ElemSet,
        eta: BTreeMap<ElemSet, ElemSet>,
        rho: BTreeMap<ElemSet, ElemSet>,
    ) -> Result<AttackPair, HigherError> {
        if eta.keys().ne(rho.keys()) {
            return Err(HigherError::PreconditionFailed {
                property: "sharedDomain".into(),
                witness: String::new(),
            });
        }
        for (x, r) in &rho {
            if !r.is_subset(&eta[x]) {
                return Err(HigherError::PreconditionFailed {
                    property: "rhoInEta".into(),
                    witness: format!("{{{}}}", join(x)),
                });
            }
            if x.is_empty() && r != &eta[x] {
                return Err(HigherError::PreconditionFailed {
                    property: "rhoEtaEmpty".into(),
                    witness: "{}".into(),
                });
            }
        }
        Ok(AttackPair { eta, rho, universe })
    }

    /// The pair with candidates being the sets themselves and survivors
    /// given by a choice function.
    pub fn from_choice(f: &ChoiceFunction) -> AttackPair {
        let eta = f.domain().map(|x| (x.clone(), x.clone())).collect();
        let rho = f.domain().map(|x| (x.clone(), f.mu(x).unwrap().clone())).collect();
        AttackPair { eta, rho, universe: f.universe().clone() }
    }

    pub fn universe(&self) -> &ElemSet {
        &self.universe
    }

    pub fn domain(&self) -> impl Iterator<Item = &ElemSet> {
        self.eta.keys()
    }

    pub fn eta(&self, x: &ElemSet) -> Option<&ElemSet> {
        self.eta.get(x)
    }

    pub fn rho(&self, x: &ElemSet) -> Option<&ElemSet> {
        self.rho.get(x)
    }
}

fn join(s: &ElemSet) -> String {
    s.iter().cloned().collect::<Vec<_>>().join(".")
}

fn first_copy<'a>(nodes: &'a BTreeSet<CopyNode>, e: &Elem) -> &'a CopyNode {
    nodes
        .iter()
        .find(|n| n.element() == e)
        .expect("every element owns at least one copy")
}

/// Build a level-2 structure realizing `rho` relative to `eta`: copies
/// carry a pick of a spoiler out of each set whose candidates include
/// the element but whose survivors do not, and a second coordinate
/// marking one set the copy must survive in.  Where a spoiler would cut
/// into that set, the attack is split into per-element strands, each
/// strand cancelled from within the set.
pub fn represent_attacking(pair: &AttackPair) -> GenStructure {
    // Keyed by element: which sets drop it, with the set itself as the
    // pool a spoiler is picked from.
    let dropping = |x: &Elem| -> Vec<(&ElemSet, &ElemSet)> {
        pair.domain()
            .filter(|s| pair.eta(s).unwrap().contains(x) && !pair.rho(s).unwrap().contains(x))
            .map(|s| (s, s))
            .collect()
    };
    // Copy tokens: pick token, "@" separator, then "*" or the guarded
    // set.
    let mut nodes: BTreeSet<CopyNode> = BTreeSet::new();
    let mut picks: BTreeMap<CopyNode, (ElemSet, Option<ElemSet>)> = BTreeMap::new();
    for x in pair.universe() {
        for sel in selections(&dropping(x)) {
            let range = selection_range(&sel);
            let plain = CopyNode::new(x.clone(), format!("{}@*", selection_token(&sel)));
            picks.insert(plain.clone(), (range.clone(), None));
            nodes.insert(plain);
            for guarded in pair.domain() {
                let eligible = pair.rho(guarded).unwrap().contains(x)
                    && pair
                        .domain()
                        .any(|s| s.is_subset(guarded) && pair.eta(s).unwrap().contains(x)
                            && !pair.rho(s).unwrap().contains(x))
                    && pair.domain().all(|bigger| {
                        !(guarded.is_subset(bigger)
                            && pair.eta(bigger).unwrap().contains(x)
                            && !pair.rho(bigger).unwrap().contains(x))
                            || range.intersection(bigger).any(|e| !guarded.contains(e))
                    });
                if eligible {
                    let node =
                        CopyNode::new(x.clone(), format!("{}@{}", selection_token(&sel), join(guarded)));
                    picks.insert(node.clone(), (range.clone(), Some(guarded.clone())));
                    nodes.insert(node);
                }
            }
        }
    }
    let mut arrows: Vec<HigherArrow> = Vec::new();
    for (node, (range, guard)) in &picks {
        for spoiler in range {
            match guard {
                Some(g) if g.contains(spoiler) => {
                    for strand in g {
                        let atk = format!("a:{spoiler}>{node}:{strand}");
                        arrows.push(HigherArrow::to_copy(
                            atk.clone(),
                            first_copy(&nodes, spoiler).clone(),
                            node.clone(),
                        ));
                        arrows.push(HigherArrow::to_arrow(
                            format!("b:{strand}>{atk}"),
                            first_copy(&nodes, strand).clone(),
                            atk,
                        ));
                    }
                }
                _ => {
                    arrows.push(HigherArrow::to_copy(
                        format!("a:{spoiler}>{node}"),
                        first_copy(&nodes, spoiler).clone(),
                        node.clone(),
                    ));
                }
            }
        }
    }
    GenStructure::new(nodes, arrows).expect("construction emits well-formed arrows")
}

/// Build a level-3 structure realizing `f` whose choice is essentially
/// smooth.  Level 1 is the selection construction over copies; each
/// level-1 arrow is then split into copies indexed by picks of chosen
/// witnesses, attacked from the sets that choose its endpoint and
/// counter-attacked from the sets that drop it.
pub fn represent_level3(f: &ChoiceFunction) -> Result<GenStructure, HigherError> {
    for p in [Property::Subset, Property::SubSup] {
        let res = check(f, &p).expect("precondition checks stay inside the domain");
        if !res.holds {
            return Err(HigherError::PreconditionFailed {
                property: p.token(),
                witness: res.witness.map(|w| w.to_string()).unwrap_or_default(),
            });
        }
    }
    // An element of a set with empty choice can never be chosen
    // anywhere: realizing the empty choice while staying stable under
    // set exchange leaves no surviving copy of it.  Without this the
    // stage-1 copy space for the element is empty and the output cannot
    // choose it.
    for s in f.domain().filter(|s| f.mu(s).unwrap().is_empty()) {
        for e in s {
            if f.domain().any(|t| f.mu(t).unwrap().contains(e)) {
                return Err(HigherError::PreconditionFailed {
                    property: "voidChoice".into(),
                    witness: format!("{{{}}} @ {e}", join(s)),
                });
            }
        }
    }
    let mut nodes: BTreeSet<CopyNode> = BTreeSet::new();
    let mut ranges: BTreeMap<CopyNode, ElemSet> = BTreeMap::new();
    for x in f.universe() {
        let slots: Vec<(&ElemSet, &ElemSet)> = f
            .domain()
            .filter(|s| s.contains(x) && !f.mu(s).unwrap().contains(x))
            .map(|s| (s, f.mu(s).unwrap()))
            .collect();
        for sel in selections(&slots) {
            let node = CopyNode::new(x.clone(), selection_token(&sel));
            ranges.insert(node.clone(), selection_range(&sel));
            nodes.insert(node);
        }
    }
    let mut arrows: Vec<HigherArrow> = Vec::new();
    let mut counter = 0usize;
    for (dest, range) in &ranges {
        for origin in nodes.iter().filter(|n| range.contains(n.element())) {
            counter += 1;
            let base_id = format!("a{counter}");
            let x = dest.element();
            let y = origin.element();
            let upholding: Vec<&ElemSet> = f
                .domain()
                .filter(|s| f.mu(s).unwrap().contains(x) && s.contains(y))
                .collect();
            let dropping: Vec<&ElemSet> = f
                .domain()
                .filter(|s| s.contains(x) && !f.mu(s).unwrap().contains(x)
                    && f.mu(s).unwrap().contains(y))
                .collect();
            if upholding.is_empty() || dropping.is_empty() {
                arrows.push(HigherArrow::to_copy(base_id, origin.clone(), dest.clone()));
                continue;
            }
            let up_slots: Vec<(&ElemSet, &ElemSet)> =
                upholding.iter().map(|s| (*s, f.mu(s).unwrap())).collect();
            let drop_slots: Vec<(&ElemSet, &ElemSet)> =
                dropping.iter().map(|s| (*s, f.mu(s).unwrap())).collect();
            for fsel in selections(&up_slots) {
                let copy_id = format!("{base_id}|f={}", selection_token(&fsel));
                arrows.push(HigherArrow::to_copy(copy_id.clone(), origin.clone(), dest.clone()));
                for xr in &upholding {
                    for gsel in selections(&drop_slots) {
                        let beta_id =
                            format!("b|{copy_id}|X={}|g={}", join(xr), selection_token(&gsel));
                        arrows.push(HigherArrow::to_arrow(
                            beta_id.clone(),
                            first_copy(&nodes, fsel[*xr]).clone(),
                            copy_id.clone(),
                        ));
                        for ys in &dropping {
                            let cuts = !f.mu(ys).unwrap().is_subset(xr) && ys.contains(fsel[*xr]);
                            if cuts {
                                arrows.push(HigherArrow::to_arrow(
                                    format!("g|{beta_id}|Y={}", join(ys)),
                                    first_copy(&nodes, gsel[*ys]).clone(),
                                    beta_id.clone(),
                                ));
                            }
                        }
                    }
                }
            }
        }
    }
    GenStructure::new(nodes, arrows)
}

/// Hand-sized structures used across the test suites.
pub mod fixtures {
    use super::*;
    use crate::choice::fixtures::set;

    fn single(e: &str) -> CopyNode {
        CopyNode::new(e, "0")
    }

    /// One direct arrow a→c attacked from a, beside the chain a→b→c;
    /// its choice is not stable under shrinking to {a,c}.
    pub fn unstable_attack() -> GenStructure {
        let nodes = [single("a"), single("b"), single("c")];
        let arrows = [
            HigherArrow::to_copy("ab", single("a"), single("b")),
            HigherArrow::to_copy("bc", single("b"), single("c")),
            HigherArrow::to_copy("ac", single("a"), single("c")),
            HigherArrow::to_arrow("beta", single("a"), "ac"),
        ];
        GenStructure::new(nodes, arrows).unwrap()
    }

    /// The three-element function that no level-2 totally smooth
    /// structure realizes: the pair sets both choose x, the full set
    /// drops it.
    pub fn deep_exchange() -> ChoiceFunction {
        let universe = set(&["x", "y", "yp"]);
        let mu = crate::choice::subsets(&universe)
            .into_iter()
            .map(|s| {
                let v = if s.len() == 3 {
                    set(&["y", "yp"])
                } else if s.len() == 2 && s.contains("x") {
                    set(&["x"])
                } else {
                    s.clone()
                };
                (s, v)
            })
            .collect();
        ChoiceFunction::new(universe, mu).unwrap()
    }

    /// A level-3 structure realizing `deep_exchange` by hand.
    pub fn deep_exchange_structure() -> GenStructure {
        let nodes = [single("x"), single("y"), single("yp")];
        let arrows = [
            HigherArrow::to_copy("a1", single("x"), single("y")),
            HigherArrow::to_copy("a2", single("x"), single("yp")),
            HigherArrow::to_copy("a3", single("y"), single("x")),
            HigherArrow::to_arrow("b1", single("y"), "a2"),
            HigherArrow::to_arrow("b2", single("yp"), "a1"),
            HigherArrow::to_arrow("b3", single("y"), "a3"),
            HigherArrow::to_arrow("b4", single("x"), "a3"),
            HigherArrow::to_arrow("g1", single("yp"), "b3"),
            HigherArrow::to_arrow("g2", single("yp"), "b4"),
        ];
        GenStructure::new(nodes, arrows).unwrap()
    }

    /// The chain a→b→c with a shortcut and one attack on the middle
    /// arrow; with `counter` a second, minimally-rooted attack is added,
    /// which is what total smoothness demands.
    pub fn attacked_chain(counter: bool) -> GenStructure {
        let nodes = [single("a"), single("b"), single("c")];
        let mut arrows = vec![
            HigherArrow::to_copy("ab", single("a"), single("b")),
            HigherArrow::to_copy("bc", single("b"), single("c")),
            HigherArrow::to_copy("ac", single("a"), single("c")),
            HigherArrow::to_arrow("beta", single("b"), "bc"),
        ];
        if counter {
            arrows.push(HigherArrow::to_arrow("betap", single("a"), "bc"));
        }
        GenStructure::new(nodes, arrows).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::choice::fixtures::set;
    use crate::pref::PrefStructure;
    use proptest::prelude::*;

    fn n(e: &str) -> CopyNode {
        CopyNode::new(e, "0")
    }

    #[test]
    fn levels_follow_the_reference_chain() {
        let s = fixtures::unstable_attack();
        assert_eq!(s.level_of("ab"), Some(1));
        assert_eq!(s.level_of("beta"), Some(2));
        assert_eq!(s.level(), 2);
        assert_eq!(s.origin_set("beta"), set(&["a"]));
        assert_eq!(s.destination_set("beta"), set(&["c"]));
    }

    #[test]
    fn reference_cycles_are_rejected() {
        // Two arrows attacking each other never bottom out at a copy.
        let nodes = [n("a"), n("b")];
        let base = HigherArrow::to_copy("base", n("a"), n("b"));
        let p = HigherArrow::to_arrow("p", n("a"), "q");
        let q = HigherArrow::to_arrow("q", n("b"), "p");
        assert_eq!(
            GenStructure::new(nodes, [base, p, q]),
            Err(HigherError::LevelOverflow("p".into()))
        );
    }

    #[test]
    fn dangling_references_are_rejected() {
        let err = GenStructure::new([n("a")], [HigherArrow::to_arrow("p", n("a"), "missing")]);
        assert_eq!(err, Err(HigherError::UnknownArrow("p".into(), "missing".into())));
    }

    #[test]
    fn attack_on_the_shortcut_flips_with_the_set() {
        let s = fixtures::unstable_attack();
        // In the full set the chain arrows survive; the shortcut is cut
        // down by its attacker and only a is chosen.
        assert_eq!(s.higher_mu(&set(&["a", "b", "c"])), set(&["a"]));
        // Without b the chain is out of range, the attack still stands,
        // and both remaining elements are chosen.
        assert_eq!(s.higher_mu(&set(&["a", "c"])), set(&["a", "c"]));
    }

    #[test]
    fn deep_exchange_structure_matches_its_function() {
        let s = fixtures::deep_exchange_structure();
        let f = fixtures::deep_exchange();
        for x in f.domain() {
            assert_eq!(&s.higher_mu(x), f.mu(x).unwrap(), "at {{{}}}", super::join(x));
        }
    }

    #[test]
    fn deep_exchange_valid_arrows_per_set() {
        let s = fixtures::deep_exchange_structure();
        let xy = set(&["x", "y"]);
        assert_eq!(
            s.valid_within(&xy, &xy),
            ["a1", "b3", "b4"].map(String::from).into()
        );
        let full = set(&["x", "y", "yp"]);
        assert_eq!(
            s.valid_within(&full, &full),
            ["a3", "b1", "b2", "g1", "g2"].map(String::from).into()
        );
    }

    #[test]
    fn level_one_choice_matches_the_copy_structure() {
        let s = fixtures::attacked_chain(false);
        let level1: Vec<&HigherArrow> = s
            .arrows()
            .filter(|a| s.level_of(&a.id) == Some(1))
            .collect();
        let rel = level1.iter().map(|a| match &a.target {
            Target::Copy(c) => (a.origin.clone(), c.clone()),
            Target::Arrow(_) => unreachable!(),
        });
        let flat = PrefStructure::new(s.nodes().clone(), rel).unwrap();
        let plain = GenStructure::new(
            s.nodes().clone(),
            level1.into_iter().cloned().collect::<Vec<_>>(),
        )
        .unwrap();
        for x in crate::choice::subsets(&set(&["a", "b", "c"])) {
            assert_eq!(plain.higher_mu(&x), flat.mu(&x));
        }
    }

    #[test]
    fn countered_attack_restores_total_smoothness() {
        let full = [set(&["a", "b", "c"])];
        let bare = fixtures::attacked_chain(false);
        let res = totally_smooth(&bare, full.iter());
        assert!(!res.holds);
        assert_eq!(res.witness.unwrap().elems, vec!["beta".to_string()]);
        let countered = fixtures::attacked_chain(true);
        assert!(totally_smooth(&countered, full.iter()).holds);
    }

    #[test]
    fn unstable_attack_breaks_essential_smoothness() {
        let s = fixtures::unstable_attack();
        let domain = [set(&["a", "b", "c"]), set(&["a", "c"])];
        // No arrow rooted in the choice {a} validly reaches c: the
        // shortcut is attacked from a with no counter.  This is exactly
        // the shape that lets the choice flip when b is dropped.
        assert!(!check_sqsubseteq(&s, &set(&["a"]), &set(&["a", "b", "c"])).holds);
        assert!(!essentially_smooth(&s, domain.iter()).holds);
        let chain = fixtures::attacked_chain(false);
        assert!(essentially_smooth(&chain, [set(&["a", "b", "c"])].iter()).holds);
    }

    #[test]
    fn rooted_validity_entails_plain_validity() {
        let s = fixtures::deep_exchange_structure();
        let x = set(&["y", "yp"]);
        let xp = set(&["x", "y", "yp"]);
        for id in s.valid_rooted(&x, &xp) {
            assert!(s.valid_within(&xp, &xp).contains(&id), "{id}");
        }
    }

    #[test]
    fn sqsubseteq_pins_down_the_choice() {
        let s = fixtures::deep_exchange_structure();
        let xp = set(&["x", "y", "yp"]);
        for x in crate::choice::subsets(&xp) {
            if check_sqsubseteq(&s, &x, &xp).holds {
                assert_eq!(x, s.higher_mu(&xp));
            }
        }
    }

    #[test]
    fn attack_pairs_enforce_their_side_conditions() {
        let u = set(&["a"]);
        let ok = AttackPair::new(
            u.clone(),
            [(set(&["a"]), set(&["a"]))].into(),
            [(set(&["a"]), set(&[]))].into(),
        );
        assert!(ok.is_ok());
        let bad = AttackPair::new(
            u.clone(),
            [(set(&["a"]), set(&[]))].into(),
            [(set(&["a"]), set(&["a"]))].into(),
        );
        assert!(matches!(bad, Err(HigherError::PreconditionFailed { property, .. })
            if property == "rhoInEta"));
        let empty = AttackPair::new(
            u,
            [(set(&[]), set(&["a"]))].into(),
            [(set(&[]), set(&[]))].into(),
        );
        assert!(matches!(empty, Err(HigherError::PreconditionFailed { property, .. })
            if property == "rhoEtaEmpty"));
    }

    fn assert_attacking_represents(pair: &AttackPair) {
        let s = represent_attacking(pair);
        for x in pair.domain() {
            let eta = pair.eta(x).unwrap();
            assert_eq!(
                &s.chosen_relative(x, eta),
                pair.rho(x).unwrap(),
                "at {{{}}}",
                super::join(x)
            );
        }
    }

    #[test]
    fn identity_pair_needs_no_valid_attacks() {
        let f = ChoiceFunction::identity(set(&["a", "b"]));
        let pair = AttackPair::from_choice(&f);
        let s = represent_attacking(&pair);
        for x in f.domain() {
            assert!(s.valid_within(x, x).is_empty());
        }
        assert_attacking_represents(&pair);
    }

    #[test]
    fn every_contained_restriction_on_two_elements_is_realizable() {
        let universe = set(&["a", "b"]);
        let subs = crate::choice::subsets(&universe);
        let nonempty: Vec<&ElemSet> = subs.iter().filter(|s| !s.is_empty()).collect();
        // All assignments rho(X) ⊆ X over the three nonempty subsets.
        let pools: Vec<Vec<ElemSet>> =
            nonempty.iter().map(|s| crate::choice::subsets(s)).collect();
        let mut counts = vec![0usize; nonempty.len()];
        loop {
            let mu: BTreeMap<ElemSet, ElemSet> = nonempty
                .iter()
                .enumerate()
                .map(|(i, s)| ((*s).clone(), pools[i][counts[i]].clone()))
                .collect();
            let f = ChoiceFunction::new(universe.clone(), mu).unwrap();
            assert_attacking_represents(&AttackPair::from_choice(&f));
            let mut i = 0;
            while i < counts.len() {
                counts[i] += 1;
                if counts[i] < pools[i].len() {
                    break;
                }
                counts[i] = 0;
                i += 1;
            }
            if i == counts.len() {
                break;
            }
        }
    }

    #[test]
    fn level3_construction_realizes_deep_exchange() {
        let f = fixtures::deep_exchange();
        let s = represent_level3(&f).unwrap();
        assert!(s.level() <= 3);
        for x in f.domain() {
            assert_eq!(&s.higher_mu(x), f.mu(x).unwrap(), "at {{{}}}", super::join(x));
        }
        let domain: Vec<ElemSet> = f.domain().cloned().collect();
        assert!(essentially_smooth(&s, domain.iter()).holds);
    }

    #[test]
    fn level3_construction_is_degenerate_on_identity() {
        let f = ChoiceFunction::identity(set(&["a", "b"]));
        let s = represent_level3(&f).unwrap();
        assert_eq!(s.level(), 1);
        assert!(s.arrows().next().is_none());
    }

    #[test]
    fn unstable_functions_are_rejected_by_level3() {
        let f = crate::choice::fixtures::cumulative_but_not_extensional();
        match represent_level3(&f) {
            Err(HigherError::PreconditionFailed { property, .. }) => {
                assert_eq!(property, "muSubSup");
            }
            other => panic!("expected a precondition failure, got {other:?}"),
        }
    }

    prop_compose! {
        fn random_function()(k in 2usize..4, picks in proptest::collection::vec(
            (0usize..16, 0u8..16), 1..6,
        )) -> ChoiceFunction {
            let universe: ElemSet = (0..k).map(|i| format!("{}", (b'a' + i as u8) as char)).collect();
            let subs = crate::choice::subsets(&universe);
            let mut mu = BTreeMap::new();
            for (si, vmask) in picks {
                let x = subs[si % subs.len()].clone();
                let value: ElemSet = x
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| vmask & (1 << i) != 0)
                    .map(|(_, e)| e.clone())
                    .collect();
                mu.insert(x, value);
            }
            ChoiceFunction::new(universe, mu).unwrap()
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn attacking_construction_matches_the_oracle(f in random_function()) {
            assert_attacking_represents(&AttackPair::from_choice(&f));
        }

        #[test]
        fn level3_construction_matches_the_oracle(f in random_function()) {
            let harmonious = f.domain().all(|s| {
                !f.mu(s).unwrap().is_empty()
                    || s.iter().all(|e| f.domain().all(|t| !f.mu(t).unwrap().contains(e)))
            });
            if harmonious
                && check(&f, &Property::Subset).unwrap().holds
                && check(&f, &Property::SubSup).unwrap().holds
            {
                let s = represent_level3(&f).unwrap();
                for x in f.domain() {
                    prop_assert_eq!(&s.higher_mu(x), f.mu(x).unwrap());
                }
                let domain: Vec<ElemSet> = f.domain().cloned().collect();
                prop_assert!(essentially_smooth(&s, domain.iter()).holds);
            }
        }
    }
}
