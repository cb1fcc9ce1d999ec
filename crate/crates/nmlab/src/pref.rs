//! Choice by minimality in a strict relation over copies of elements.
//!
//! A copy structure carries several indexed copies of each element and an
//! arbitrary binary relation between copies.  An element is chosen from a
//! set when at least one of its copies has no strictly smaller copy whose
//! element also lies in the set.  The module recognises structural
//! properties of the relation (transitive, smooth, ranked, layer-ranked)
//! and builds structures realizing a given choice function under the
//! matching preconditions: a general construction over selection
//! functions, a transitive refinement over trees, a smooth construction
//! over stabilized repair sequences, a smooth transitive construction
//! over staged trees, a ranked construction over a derived quality order,
//! and layer-ranked variants.  `verify` is the brute-force oracle all of
//! them are measured against.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use thiserror::Error;

use crate::choice::{check, hull, ChoiceFunction, Elem, ElemSet, CheckResult, Property, Witness};

fn join(s: &ElemSet) -> String {
    s.iter().cloned().collect::<Vec<_>>().join(".")
}

/// One copy of an element: the element plus an opaque index token naming
/// which copy it is (a selection function, a tree, a rank, ...).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct CopyNode {
    element: Elem,
    index: String,
}

impl CopyNode {
    pub fn new(element: impl Into<Elem>, index: impl Into<String>) -> CopyNode {
        CopyNode { element: element.into(), index: index.into() }
    }

    pub fn element(&self) -> &Elem {
        &self.element
    }

    pub fn index(&self) -> &str {
        &self.index
    }
}

impl std::fmt::Display for CopyNode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}#{}", self.element, self.index)
    }
}

#[derive(Error, Clone, PartialEq, Eq, Debug)]
pub enum PrefError {
    #[error("construction precondition {property} fails at {witness}")]
    PreconditionFailed { property: String, witness: String },
    #[error("domain is not closed under {operation}, missing {{{set}}}")]
    DomainClosure { operation: String, set: String },
    #[error("derived quality order contains a cycle: {}", .0.join(" < "))]
    CycleInQualityRelation(Vec<Elem>),
    #[error("bad partition: {0}")]
    BadPartition(String),
    #[error("relation endpoint {0} is not a node of the structure")]
    UnknownCopy(String),
}

/// An ordered disjoint cover of a base set into nonempty blocks; earlier
/// blocks are better.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RankedPartition {
    blocks: Vec<ElemSet>,
}

impl RankedPartition {
    pub fn new(blocks: Vec<ElemSet>, base: &ElemSet) -> Result<RankedPartition, PrefError> {
        let mut seen: ElemSet = ElemSet::new();
        for b in &blocks {
            if b.is_empty() {
                return Err(PrefError::BadPartition("empty block".into()));
            }
            for e in b {
                if !seen.insert(e.clone()) {
                    return Err(PrefError::BadPartition(format!("element {e} in two blocks")));
                }
            }
        }
        if &seen != base {
            return Err(PrefError::BadPartition(format!(
                "blocks cover {{{}}} but the base set is {{{}}}",
                join(&seen),
                join(base)
            )));
        }
        Ok(RankedPartition { blocks })
    }

    pub fn blocks(&self) -> &[ElemSet] {
        &self.blocks
    }

    pub fn rank(&self, e: &Elem) -> Option<usize> {
        self.blocks.iter().position(|b| b.contains(e))
    }
}

/// A finite set of copies with a strict "better than" relation between
/// them.  `rel` holds pairs `(smaller, larger)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PrefStructure {
    nodes: BTreeSet<CopyNode>,
    rel: BTreeSet<(CopyNode, CopyNode)>,
}

impl PrefStructure {
    pub fn new(
        nodes: impl IntoIterator<Item = CopyNode>,
        rel: impl IntoIterator<Item = (CopyNode, CopyNode)>,
    ) -> Result<PrefStructure, PrefError> {
        let nodes: BTreeSet<CopyNode> = nodes.into_iter().collect();
        let rel: BTreeSet<(CopyNode, CopyNode)> = rel.into_iter().collect();
        for (a, b) in &rel {
            for end in [a, b] {
                if !nodes.contains(end) {
                    return Err(PrefError::UnknownCopy(end.to_string()));
                }
            }
        }
        Ok(PrefStructure { nodes, rel })
    }

    pub fn nodes(&self) -> &BTreeSet<CopyNode> {
        &self.nodes
    }

    pub fn rel(&self) -> &BTreeSet<(CopyNode, CopyNode)> {
        &self.rel
    }

    fn below<'a>(&'a self, n: &'a CopyNode) -> impl Iterator<Item = &'a CopyNode> {
        self.rel.iter().filter(move |(_, b)| b == n).map(|(a, _)| a)
    }

    /// The chosen elements of `x`: those with a copy that no copy of an
    /// element of `x` undercuts.  Elements without any copy never appear.
    pub fn mu(&self, x: &ElemSet) -> ElemSet {
        x.iter()
            .filter(|e| {
                self.nodes.iter().filter(|n| &n.element == *e).any(|n| {
                    !self.below(n).any(|m| x.contains(&m.element))
                })
            })
            .cloned()
            .collect()
    }

    /// Does every member of every domain set sit on or above a copy that
    /// is minimal within that set?
    pub fn is_smooth<'a>(&self, domain: impl IntoIterator<Item = &'a ElemSet>) -> CheckResult {
        for x in domain {
            for n in self.nodes.iter().filter(|n| x.contains(&n.element)) {
                let dominated = self.below(n).any(|m| x.contains(&m.element));
                if !dominated {
                    continue;
                }
                let repaired = self.below(n).any(|m| {
                    x.contains(&m.element)
                        && !self.below(m).any(|k| x.contains(&k.element))
                });
                if !repaired {
                    return fail(vec![x.clone()], vec![n.to_string()]);
                }
            }
        }
        pass()
    }

    pub fn is_transitive(&self) -> CheckResult {
        for (a, b) in &self.rel {
            for (b2, c) in &self.rel {
                if b == b2 && !self.rel.contains(&(a.clone(), c.clone())) {
                    return fail(vec![], vec![a.to_string(), b.to_string(), c.to_string()]);
                }
            }
        }
        pass()
    }

    pub fn is_irreflexive(&self) -> CheckResult {
        for (a, b) in &self.rel {
            if a == b {
                return fail(vec![], vec![a.to_string()]);
            }
        }
        pass()
    }

    /// Modularity: the relation is induced by a map into a total strict
    /// order, equivalently incomparable copies have the same copies above
    /// and below them.
    pub fn is_ranked(&self) -> CheckResult {
        let irr = self.is_irreflexive();
        if !irr.holds {
            return irr;
        }
        let nodes: Vec<&CopyNode> = self.nodes.iter().collect();
        for x in &nodes {
            for y in &nodes {
                let incomparable = !self.rel.contains(&((*x).clone(), (*y).clone()))
                    && !self.rel.contains(&((*y).clone(), (*x).clone()));
                if !incomparable {
                    continue;
                }
                for z in &nodes {
                    let bad = (self.rel.contains(&((*z).clone(), (*x).clone()))
                        && !self.rel.contains(&((*z).clone(), (*y).clone())))
                        || (self.rel.contains(&((*x).clone(), (*z).clone()))
                            && !self.rel.contains(&((*y).clone(), (*z).clone())));
                    if bad {
                        return fail(vec![], vec![x.to_string(), y.to_string(), z.to_string()]);
                    }
                }
            }
        }
        pass()
    }

    /// Every copy in a better block undercuts every copy in a worse one.
    /// Copies of elements outside the partition base are ignored.
    pub fn is_layer_ranked(&self, p: &RankedPartition) -> CheckResult {
        for a in &self.nodes {
            for b in &self.nodes {
                if let (Some(ra), Some(rb)) = (p.rank(&a.element), p.rank(&b.element)) {
                    if ra < rb && !self.rel.contains(&(a.clone(), b.clone())) {
                        return fail(vec![], vec![a.to_string(), b.to_string()]);
                    }
                }
            }
        }
        pass()
    }

    /// Replace the relation by its transitive closure.
    fn transitively_closed(mut self) -> PrefStructure {
        loop {
            let mut added = Vec::new();
            for (a, b) in &self.rel {
                for (b2, c) in &self.rel {
                    if b == b2 {
                        let p = (a.clone(), c.clone());
                        if !self.rel.contains(&p) {
                            added.push(p);
                        }
                    }
                }
            }
            if added.is_empty() {
                return self;
            }
            self.rel.extend(added);
        }
    }
}

fn pass() -> CheckResult {
    CheckResult { holds: true, witness: None }
}

fn fail(sets: Vec<ElemSet>, elems: Vec<Elem>) -> CheckResult {
    CheckResult { holds: false, witness: Some(Witness { sets, elems }) }
}

/// The oracle: the structure realizes the function iff their choices
/// agree on every domain set.  The witness is the first mismatch, with
/// the disagreeing elements.
pub fn verify(s: &PrefStructure, f: &ChoiceFunction) -> CheckResult {
    for x in f.domain() {
        let got = s.mu(x);
        let want = f.mu(x).unwrap();
        if &got != want {
            let diff: Vec<Elem> = got.symmetric_difference(want).cloned().collect();
            return fail(vec![x.clone()], diff);
        }
    }
    pass()
}

fn require(f: &ChoiceFunction, p: Property) -> Result<(), PrefError> {
    // Checking a construction precondition never needs sets outside the
    // domain, so the inner error cannot occur for the properties used
    // here; map it defensively all the same.
    let res = check(f, &p).map_err(|e| PrefError::PreconditionFailed {
        property: p.token(),
        witness: e.to_string(),
    })?;
    if res.holds {
        Ok(())
    } else {
        Err(PrefError::PreconditionFailed {
            property: p.token(),
            witness: res.witness.map(|w| w.to_string()).unwrap_or_default(),
        })
    }
}

/// All ways of picking one element out of each listed set, in canonical
/// order.  An empty list has exactly the empty pick; an empty set in the
/// list admits no pick at all.
pub(crate) fn selections<'a>(
    slots: &[(&'a ElemSet, &'a ElemSet)],
) -> Vec<BTreeMap<&'a ElemSet, &'a Elem>> {
    let mut out = vec![BTreeMap::new()];
    for (key, values) in slots {
        let mut next = Vec::new();
        for partial in &out {
            for v in values.iter() {
                let mut m = partial.clone();
                m.insert(*key, v);
                next.push(m);
            }
        }
        out = next;
    }
    out
}

pub(crate) fn selection_token(sel: &BTreeMap<&ElemSet, &Elem>) -> String {
    if sel.is_empty() {
        return "-".into();
    }
    sel.iter()
        .map(|(k, v)| format!("{}:{v}", join(k)))
        .collect::<Vec<_>>()
        .join(";")
}

pub(crate) fn selection_range(sel: &BTreeMap<&ElemSet, &Elem>) -> ElemSet {
    sel.values().map(|v| (*v).clone()).collect()
}

/// The sets a given element belongs to without being chosen from,
/// paired with the pool a killer is picked from.
fn unchosen_slots<'a>(
    f: &'a ChoiceFunction,
    x: &Elem,
    pool: impl Fn(&'a ElemSet) -> &'a ElemSet,
) -> Vec<(&'a ElemSet, &'a ElemSet)> {
    f.domain()
        .filter(|y| y.contains(x) && !f.mu(y).unwrap().contains(x))
        .map(|y| (y, pool(y)))
        .collect()
}

/// Build a structure realizing `f` from selection-function copies: one
/// copy of `x` per way of picking a killer out of each set that drops
/// `x`, a copy being undercut exactly by the elements its picks name.
pub fn represent_general(f: &ChoiceFunction) -> Result<PrefStructure, PrefError> {
    require(f, Property::Subset)?;
    require(f, Property::Pr)?;
    Ok(general_structure(f, |_| None))
}

/// The selection-function construction, with optional extra "better
/// layer" edges injected by rank (used by the layer-ranked variant).
fn general_structure(
    f: &ChoiceFunction,
    rank: impl Fn(&Elem) -> Option<usize>,
) -> PrefStructure {
    let mut nodes = BTreeSet::new();
    let mut ranges: BTreeMap<CopyNode, ElemSet> = BTreeMap::new();
    for x in f.universe() {
        for sel in selections(&unchosen_slots(f, x, |y| y)) {
            let node = CopyNode::new(x.clone(), selection_token(&sel));
            ranges.insert(node.clone(), selection_range(&sel));
            nodes.insert(node);
        }
    }
    let mut rel = BTreeSet::new();
    for (node, range) in &ranges {
        for smaller in &nodes {
            let named = range.contains(&smaller.element);
            let better = match (rank(&smaller.element), rank(&node.element)) {
                (Some(a), Some(b)) => a < b,
                _ => false,
            };
            if named || better {
                rel.insert((smaller.clone(), node.clone()));
            }
        }
    }
    PrefStructure { nodes, rel }
}

/// Build a transitive structure realizing `f`.  Copies are trees: a
/// plain leaf where nothing drops `x`, a self-repeating spine otherwise,
/// and one branching tree per selection whose children immediately
/// continue with spines.  The subtree relation is transitively closed;
/// spines undercut themselves, which keeps them out of every choice
/// without outside help.
pub fn represent_transitive(f: &ChoiceFunction) -> Result<PrefStructure, PrefError> {
    require(f, Property::Subset)?;
    require(f, Property::Pr)?;
    let dropped = |x: &Elem| !unchosen_slots(f, x, |y| y).is_empty();
    let base_copy = |x: &Elem| {
        if dropped(x) {
            CopyNode::new(x.clone(), "spin")
        } else {
            CopyNode::new(x.clone(), "leaf")
        }
    };
    let mut nodes = BTreeSet::new();
    let mut rel = BTreeSet::new();
    for x in f.universe() {
        let base = base_copy(x);
        if dropped(x) {
            rel.insert((base.clone(), base.clone()));
        }
        nodes.insert(base);
        for sel in selections(&unchosen_slots(f, x, |y| y)) {
            if sel.is_empty() {
                continue;
            }
            let node = CopyNode::new(x.clone(), format!("t:{}", selection_token(&sel)));
            for y in selection_range(&sel) {
                rel.insert((base_copy(&y), node.clone()));
            }
            nodes.insert(node);
        }
    }
    Ok(PrefStructure { nodes, rel }.transitively_closed())
}

/// The union an infinite repair sequence for `x` can stabilize to: start
/// from one pick of a chosen element out of each set that drops `x`,
/// then repeatedly pick out of the choice of every set that the current
/// picks re-enter.  Enumerated as the accumulated sets of lasso-shaped
/// runs over the finite state space.
fn stable_repair_unions(f: &ChoiceFunction, x: &Elem) -> BTreeSet<ElemSet> {
    let start_slots = unchosen_slots(f, x, |y| f.mu(y).unwrap());
    let successors = |frontier: &ElemSet| -> BTreeSet<ElemSet> {
        let slots: Vec<(&ElemSet, &ElemSet)> = f
            .domain()
            .filter(|s| f.mu(s).unwrap().contains(x) && !frontier.is_disjoint(s))
            .map(|s| (s, f.mu(s).unwrap()))
            .collect();
        selections(&slots).iter().map(selection_range).collect()
    };

    // Reachable (accumulated, frontier) states.
    let mut states: BTreeSet<(ElemSet, ElemSet)> = BTreeSet::new();
    let mut queue: Vec<(ElemSet, ElemSet)> = selections(&start_slots)
        .iter()
        .map(|sel| {
            let r = selection_range(sel);
            (r.clone(), r)
        })
        .collect();
    while let Some(state) = queue.pop() {
        if !states.insert(state.clone()) {
            continue;
        }
        let (acc, frontier) = state;
        for next in successors(&frontier) {
            queue.push((&acc | &next, next));
        }
    }

    // An accumulated set is stable iff, once reached, the run can keep
    // going forever without growing it: its frontier graph has a cycle.
    let mut out = BTreeSet::new();
    let accs: BTreeSet<&ElemSet> = states.iter().map(|(a, _)| a).collect();
    for acc in accs {
        let frontiers: BTreeSet<&ElemSet> = states
            .iter()
            .filter(|(a, _)| a == acc)
            .map(|(_, f)| f)
            .collect();
        if has_cycle(&frontiers, |fr| {
            successors(fr).into_iter().filter(|n| n.is_subset(acc)).collect()
        }) {
            out.insert(acc.clone());
        }
    }
    out
}

fn has_cycle(nodes: &BTreeSet<&ElemSet>, succ: impl Fn(&ElemSet) -> Vec<ElemSet>) -> bool {
    // Colors: 0 unseen, 1 on stack, 2 done.
    let mut color: BTreeMap<&ElemSet, u8> = nodes.iter().map(|n| (*n, 0u8)).collect();
    fn visit<'a>(
        n: &'a ElemSet,
        nodes: &BTreeSet<&'a ElemSet>,
        succ: &impl Fn(&ElemSet) -> Vec<ElemSet>,
        color: &mut BTreeMap<&'a ElemSet, u8>,
    ) -> bool {
        color.insert(n, 1);
        for next in succ(n) {
            let Some(next_ref) = nodes.iter().find(|m| ***m == next) else {
                continue;
            };
            match color[*next_ref] {
                1 => return true,
                0 => {
                    if visit(*next_ref, nodes, succ, color) {
                        return true;
                    }
                }
                _ => {}
            }
        }
        color.insert(n, 2);
        false
    }
    let all: Vec<&ElemSet> = nodes.iter().copied().collect();
    for n in all {
        if color[n] == 0 && visit(n, nodes, &succ, &mut color) {
            return true;
        }
    }
    false
}

/// Build a smooth structure realizing `f`: copies of chosen elements are
/// the stabilized repair unions, a copy being undercut exactly by the
/// elements of its union.  Elements never chosen anywhere get a single
/// copy pinned under everything where that keeps smoothness intact.
pub fn represent_smooth(f: &ChoiceFunction) -> Result<PrefStructure, PrefError> {
    require(f, Property::Subset)?;
    require(f, Property::HullAnchored)?;
    let chosen_somewhere: ElemSet = f
        .universe()
        .iter()
        .filter(|x| f.domain().any(|s| f.mu(s).unwrap().contains(*x)))
        .cloned()
        .collect();
    let mut nodes = BTreeSet::new();
    let mut unions: BTreeMap<CopyNode, ElemSet> = BTreeMap::new();
    for x in &chosen_somewhere {
        for u in stable_repair_unions(f, x) {
            let node = CopyNode::new(x.clone(), format!("u:{}", join(&u)));
            unions.insert(node.clone(), u);
            nodes.insert(node);
        }
    }
    let mut rel = BTreeSet::new();
    for (node, u) in &unions {
        for smaller in nodes.clone() {
            if u.contains(&smaller.element) {
                rel.insert((smaller, node.clone()));
            }
        }
    }
    // Never-chosen elements: a copy must be undercut inside every domain
    // set containing the element, which a chosen witness provides only
    // where the choice there is nonempty.
    for x in f.universe() {
        if chosen_somewhere.contains(x) {
            continue;
        }
        let containing: Vec<&ElemSet> = f.domain().filter(|s| s.contains(x)).collect();
        if containing.iter().any(|s| f.mu(s).unwrap().is_empty()) {
            continue;
        }
        let top = CopyNode::new(x.clone(), "top");
        for smaller in unions.keys() {
            rel.insert((smaller.clone(), top.clone()));
        }
        nodes.insert(top);
    }
    Ok(PrefStructure { nodes, rel })
}

/// A staged tree: each node remembers the set accumulated so far and the
/// element standing at it.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
struct Stage {
    base: ElemSet,
    elem: Elem,
    children: Vec<Stage>,
}

impl Stage {
    fn token(&self) -> String {
        let kids: Vec<String> = self.children.iter().map(|c| c.token()).collect();
        if kids.is_empty() {
            format!("{}|{}", join(&self.base), self.elem)
        } else {
            format!("{}|{}({})", join(&self.base), self.elem, kids.join(","))
        }
    }
}

fn hull_set(f: &ChoiceFunction, base: &ElemSet, memo: &mut BTreeMap<ElemSet, ElemSet>) -> ElemSet {
    if let Some(h) = memo.get(base) {
        return h.clone();
    }
    let h = hull(f, base, None)
        .map(|t| t.fixpoint().clone())
        .unwrap_or_else(|_| base.clone());
    memo.insert(base.clone(), h.clone());
    h
}

/// All staged trees rooted at a chosen element of `base`: children step
/// to every domain set escaping the hull of the accumulated base, the
/// stepping element picked from the fresh part of the choice on the
/// union.  Accumulated bases grow strictly, so the trees are finite.
fn staged_trees(
    f: &ChoiceFunction,
    base: &ElemSet,
    x: &Elem,
    hulls: &mut BTreeMap<ElemSet, ElemSet>,
    memo: &mut BTreeMap<(ElemSet, Elem), Vec<Stage>>,
) -> Vec<Stage> {
    let key = (base.clone(), x.clone());
    if let Some(done) = memo.get(&key) {
        return done.clone();
    }
    let h = hull_set(f, base, hulls);
    let steps: Vec<(ElemSet, ElemSet)> = f
        .domain()
        .filter(|y| y.contains(x) && !y.is_subset(&h))
        .map(|y| {
            let union = base | y;
            let pool: ElemSet = f
                .mu(&union)
                .map(|m| m - &h)
                .unwrap_or_default();
            (union, pool)
        })
        .collect();
    let slot_refs: Vec<(&ElemSet, &ElemSet)> = steps.iter().map(|(u, p)| (u, p)).collect();
    let mut out = Vec::new();
    for sel in selections(&slot_refs) {
        // One tree per way of continuing every child.
        let mut child_options: Vec<Vec<Stage>> = Vec::new();
        for (union, _) in &steps {
            let y = sel[union];
            child_options.push(staged_trees(f, union, y, hulls, memo));
        }
        let mut combos: Vec<Vec<Stage>> = vec![Vec::new()];
        for options in &child_options {
            let mut next = Vec::new();
            for partial in &combos {
                for opt in options {
                    let mut c = partial.clone();
                    c.push(opt.clone());
                    next.push(c);
                }
            }
            combos = next;
        }
        for children in combos {
            out.push(Stage { base: base.clone(), elem: x.clone(), children });
        }
    }
    memo.insert(key, out.clone());
    out
}

/// Build a smooth transitive structure realizing `f` over staged trees:
/// trees rooted at chosen elements give the minimal copies, trees rooted
/// at an empty stage one nonminimal copy per element, and the subtree
/// relation is transitively closed.
pub fn represent_smooth_transitive(f: &ChoiceFunction) -> Result<PrefStructure, PrefError> {
    if !f.union_closed() {
        return Err(union_gap(f));
    }
    require(f, Property::Subset)?;
    require(f, Property::Pr)?;
    require(f, Property::Cum)?;
    let mut hulls = BTreeMap::new();
    let mut memo = BTreeMap::new();
    let mut nodes = BTreeSet::new();
    let mut rel = BTreeSet::new();
    let tree_copy = |stage: &Stage| CopyNode::new(stage.elem.clone(), stage.token());

    // Minimal copies: every staged tree of every chosen element, with
    // the whole subtree fan-out linked in.
    let mut stack: Vec<Stage> = Vec::new();
    for u in f.domain() {
        for x in f.mu(u).unwrap().clone() {
            stack.extend(staged_trees(f, u, &x, &mut hulls, &mut memo));
        }
    }
    while let Some(stage) = stack.pop() {
        let node = tree_copy(&stage);
        if !nodes.insert(node.clone()) {
            continue;
        }
        for child in &stage.children {
            rel.insert((tree_copy(child), node.clone()));
            stack.push(child.clone());
        }
    }

    // Nonminimal copies: one spine per element, undercut by a chosen
    // witness in every domain set containing it.
    for x in f.universe() {
        let slots: Vec<(&ElemSet, &ElemSet)> = f
            .domain()
            .filter(|u| u.contains(x))
            .map(|u| (u, f.mu(u).unwrap()))
            .collect();
        for sel in selections(&slots) {
            let node = CopyNode::new(x.clone(), format!("n:{}", selection_token(&sel)));
            let mut grafts = Vec::new();
            for (u, _) in &slots {
                let y = sel[*u];
                let trees = staged_trees(f, u, y, &mut hulls, &mut memo);
                // One graft suffices; take the canonical first tree.
                if let Some(t) = trees.first() {
                    grafts.push(t.clone());
                }
            }
            for g in &grafts {
                rel.insert((tree_copy(g), node.clone()));
            }
            nodes.insert(node);
        }
    }
    PrefStructure::new(nodes.clone(), rel.into_iter().filter(|(a, b)| {
        nodes.contains(a) && nodes.contains(b)
    }))
    .map(PrefStructure::transitively_closed)
}

fn union_gap(f: &ChoiceFunction) -> PrefError {
    let members: Vec<&ElemSet> = f.domain().collect();
    for a in &members {
        for b in &members {
            let u = *a | *b;
            if !f.contains(&u) {
                return PrefError::DomainClosure { operation: "union".into(), set: join(&u) };
            }
        }
    }
    PrefError::DomainClosure { operation: "union".into(), set: String::new() }
}

/// Derive the quality order forced by `f` — chosen together means same
/// level, chosen against passed-over means strictly better — close it,
/// and reject on any cycle.  Returns the elements grouped into levels,
/// best first, ties broken canonically.
fn quality_levels(f: &ChoiceFunction) -> Result<Vec<Vec<Elem>>, PrefError> {
    let elems: Vec<Elem> = f.universe().iter().cloned().collect();
    let idx: BTreeMap<&Elem, usize> = elems.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let n = elems.len();

    // Union-find over "same level".
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    let mut strict: BTreeSet<(usize, usize)> = BTreeSet::new();
    for u in f.domain() {
        let m = f.mu(u).unwrap();
        let chosen: Vec<usize> = m.iter().map(|e| idx[e]).collect();
        for w in chosen.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            if a != b {
                parent[a] = b;
            }
        }
        for x in m {
            for y in u.iter().filter(|y| !m.contains(*y)) {
                strict.insert((idx[x], idx[y]));
            }
        }
    }
    let class = |parent: &mut Vec<usize>, i: usize| find(parent, i);
    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    for (a, b) in &strict {
        let (ca, cb) = (class(&mut parent, *a), class(&mut parent, *b));
        if ca == cb {
            return Err(PrefError::CycleInQualityRelation(vec![
                elems[*a].clone(),
                elems[*b].clone(),
                elems[*a].clone(),
            ]));
        }
        edges.insert((ca, cb));
    }
    // Transitive closure over classes, watching for cycles.
    loop {
        let mut added = Vec::new();
        for (a, b) in &edges {
            for (b2, c) in &edges {
                if b == b2 && !edges.contains(&(*a, *c)) {
                    added.push((*a, *c));
                }
            }
        }
        if added.is_empty() {
            break;
        }
        edges.extend(added);
    }
    for (a, b) in &edges {
        if edges.contains(&(*b, *a)) {
            return Err(PrefError::CycleInQualityRelation(vec![
                elems[*a].clone(),
                elems[*b].clone(),
                elems[*a].clone(),
            ]));
        }
    }

    // Canonical topological layering: repeatedly emit the best available
    // class, ordering ties by smallest member.
    let mut classes: BTreeMap<usize, Vec<Elem>> = BTreeMap::new();
    for (i, e) in elems.iter().enumerate() {
        classes.entry(class(&mut parent, i)).or_default().push(e.clone());
    }
    let mut remaining: BTreeSet<usize> = classes.keys().copied().collect();
    let mut levels = Vec::new();
    while !remaining.is_empty() {
        let ready: Vec<usize> = remaining
            .iter()
            .filter(|c| !edges.iter().any(|(a, b)| b == *c && remaining.contains(a)))
            .copied()
            .collect();
        let pick = *ready
            .iter()
            .min_by_key(|c| classes[*c].first().cloned())
            .expect("acyclic order always has a minimal class");
        levels.push(classes[&pick].clone());
        remaining.remove(&pick);
    }
    Ok(levels)
}

/// Build a ranked structure realizing `f`: one copy per element at the
/// level the derived quality order assigns it, lower levels undercutting
/// higher ones wholesale.
pub fn represent_ranked(f: &ChoiceFunction) -> Result<PrefStructure, PrefError> {
    if !f.has_singletons() {
        return Err(PrefError::DomainClosure {
            operation: "singletons".into(),
            set: String::new(),
        });
    }
    if !f.union_closed() {
        return Err(union_gap(f));
    }
    require(f, Property::Subset)?;
    require(f, Property::EmptyFin)?;
    require(f, Property::Eq)?;
    require(f, Property::In)?;
    let levels = quality_levels(f)?;
    let mut nodes = BTreeSet::new();
    let mut rel = BTreeSet::new();
    let copy = |level: usize, e: &Elem| CopyNode::new(e.clone(), level.to_string());
    for (i, level) in levels.iter().enumerate() {
        for e in level {
            nodes.insert(copy(i, e));
            for (j, lower) in levels.iter().enumerate().take(i) {
                for d in lower {
                    rel.insert((copy(j, d), copy(i, e)));
                }
            }
        }
    }
    Ok(PrefStructure { nodes, rel })
}

/// Build a layer-ranked structure realizing `f` against the given
/// partition.  The plain route adds better-layer edges to the selection
/// construction; the smooth route adds them to the smooth transitive
/// construction, which keeps both smoothness and transitivity.
pub fn represent_layer_ranked(
    f: &ChoiceFunction,
    p: &RankedPartition,
    smooth: bool,
) -> Result<PrefStructure, PrefError> {
    if p.blocks().iter().flatten().cloned().collect::<ElemSet>() != *f.universe() {
        return Err(PrefError::BadPartition("blocks do not cover the universe".into()));
    }
    require(f, Property::Subset)?;
    require(f, Property::Pr)?;
    require(f, Property::Layered(p.blocks().to_vec()))?;
    if !smooth {
        return Ok(general_structure(f, |e| p.rank(e)));
    }
    require(f, Property::Cum)?;
    let base = represent_smooth_transitive(f)?;
    let mut rel = base.rel.clone();
    for a in &base.nodes {
        for b in &base.nodes {
            if let (Some(ra), Some(rb)) = (p.rank(&a.element), p.rank(&b.element)) {
                if ra < rb {
                    rel.insert((a.clone(), b.clone()));
                }
            }
        }
    }
    Ok(PrefStructure { nodes: base.nodes, rel }.transitively_closed())
}
