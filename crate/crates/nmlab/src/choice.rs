//! Finite choice functions and their algebraic coherence conditions.
//!
//! A choice function picks a subset `mu(X)` from each member `X` of an
//! explicit set family.  The family is *not* implicitly closed under
//! unions or intersections: conditions that need a set outside the
//! family report that, rather than silently skipping the instance.
//! Alongside the μ-conditions, this module houses abstract size systems
//! (per-set ideals of "small" subsets), the hull construction `H(U,u)`,
//! and a search harness for implications between conditions.

use std::collections::{BTreeMap, BTreeSet};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Elements of a universe are plain names.
pub type Elem = String;

/// Finite sets of elements, ordered for deterministic iteration.
pub type ElemSet = BTreeSet<Elem>;

#[derive(Error, Clone, PartialEq, Eq, Debug)]
pub enum ChoiceError {
    #[error("set {{{}}} is needed by {property} but is not in the domain", join(.set))]
    DomainClosure { property: String, set: ElemSet },
    #[error("index {requested} exceeds the configured bound {max}")]
    BoundExceeded { requested: usize, max: usize },
    #[error("invalid partition: {0}")]
    BadPartition(String),
    #[error("set {{{}}} is not in the domain", join(.0))]
    UnknownSet(ElemSet),
    #[error("element {0} is not in the universe")]
    UnknownElement(Elem),
    #[error("invalid function: {0}")]
    BadFunction(String),
}

fn join(s: &ElemSet) -> String {
    s.iter().cloned().collect::<Vec<_>>().join(",")
}

/// A choice function on an explicit domain: `mu` maps each domain
/// member to a subset of the universe.  The codomain is the full power
/// set of the universe, so `mu` may not be applied twice unless the
/// intermediate value happens to lie in the domain.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct ChoiceFunction {
    universe: ElemSet,
    mu: BTreeMap<ElemSet, ElemSet>,
}

impl ChoiceFunction {
    pub fn new(
        universe: ElemSet,
        mu: BTreeMap<ElemSet, ElemSet>,
    ) -> Result<ChoiceFunction, ChoiceError> {
        for (x, v) in &mu {
            if !x.is_subset(&universe) {
                return Err(ChoiceError::BadFunction(format!(
                    "domain member {{{}}} is not a subset of the universe",
                    join(x)
                )));
            }
            if !v.is_subset(&universe) {
                return Err(ChoiceError::BadFunction(format!(
                    "value {{{}}} is not a subset of the universe",
                    join(v)
                )));
            }
        }
        Ok(ChoiceFunction { universe, mu })
    }

    /// The identity function on the full power set of `universe`.
    pub fn identity(universe: ElemSet) -> ChoiceFunction {
        let mu = subsets(&universe).into_iter().map(|x| (x.clone(), x)).collect();
        ChoiceFunction { universe, mu }
    }

    pub fn universe(&self) -> &ElemSet {
        &self.universe
    }

    pub fn domain(&self) -> impl Iterator<Item = &ElemSet> {
        self.mu.keys()
    }

    pub fn contains(&self, x: &ElemSet) -> bool {
        self.mu.contains_key(x)
    }

    pub fn mu(&self, x: &ElemSet) -> Option<&ElemSet> {
        self.mu.get(x)
    }

    pub fn domain_len(&self) -> usize {
        self.mu.len()
    }

    /// Closure of the domain under binary intersections.
    pub fn intersection_closed(&self) -> bool {
        self.closed(|a, b| a & b)
    }

    /// Closure of the domain under binary unions.
    pub fn union_closed(&self) -> bool {
        self.closed(|a, b| a | b)
    }

    /// Closure of the domain under set difference.
    pub fn difference_closed(&self) -> bool {
        self.closed(|a, b| a - b)
    }

    /// Every singleton of the universe is in the domain.
    pub fn has_singletons(&self) -> bool {
        self.universe
            .iter()
            .all(|e| self.mu.contains_key(&ElemSet::from([e.clone()])))
    }

    fn closed(&self, op: impl Fn(&ElemSet, &ElemSet) -> ElemSet) -> bool {
        self.mu
            .keys()
            .all(|a| self.mu.keys().all(|b| self.mu.contains_key(&op(a, b))))
    }
}

/// All subsets of `base`, in the natural set order.
pub fn subsets(base: &ElemSet) -> Vec<ElemSet> {
    let elems: Vec<&Elem> = base.iter().collect();
    let mut out: Vec<ElemSet> = (0u32..1 << elems.len())
        .map(|mask| {
            elems
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, e)| (*e).clone())
                .collect()
        })
        .collect();
    out.sort();
    out
}

/// The coherence conditions checkable on a choice function.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Property {
    /// mu(X) ⊆ X.
    Subset,
    /// mu(X) = ∅ ⇒ X = ∅.
    Empty,
    /// X ≠ ∅ ⇒ mu(X) ≠ ∅ (exact on finite domains).
    EmptyFin,
    /// X ⊆ Y ⇒ mu(Y) ∩ X ⊆ mu(X).
    Pr,
    /// mu(X) ∩ Y ⊆ mu(X ∩ Y).
    PrPrime,
    /// mu(X ∪ Y) ⊆ mu(X) ∪ mu(Y).
    Or,
    /// mu(X ∪ Y) ⊆ mu(X) ∪ Y.
    WOr,
    /// X ∩ Y = ∅ ⇒ mu(X ∪ Y) ⊆ mu(X) ∪ mu(Y).
    DisjOr,
    /// mu(X) ⊆ Y ⊆ X ⇒ mu(X) ⊆ mu(Y).
    Cut,
    /// mu(X) ⊆ Y ⊆ X ⇒ mu(Y) ⊆ mu(X).
    Cm,
    /// mu(X) ⊆ A ∩ B ⇒ mu(X ∩ A) ⊆ B.
    ResM,
    /// mu(X) ⊆ Y ⊆ X ⇒ mu(Y) = mu(X).
    Cum,
    /// mu(X) ⊆ Y, mu(Y) ⊆ X ⇒ mu(X) = mu(Y).
    SubSup,
    /// X ⊆ Y, X ∩ mu(Y) ≠ ∅ ⇒ mu(X) = mu(Y) ∩ X.
    Eq,
    /// mu(Y) ∩ X ≠ ∅ ⇒ mu(Y ∩ X) = mu(Y) ∩ X.
    EqPrime,
    /// mu(X ∪ Y) is one of mu(X), mu(Y), mu(X) ∪ mu(Y).
    Par,
    /// mu(Y) ∩ (X − mu(X)) ≠ ∅ ⇒ mu(X ∪ Y) ∩ Y = ∅.
    Union,
    /// mu(Y) ∩ (X − mu(X)) ≠ ∅ ⇒ mu(X ∪ Y) = mu(X).
    UnionPrime,
    /// a ∈ X − mu(X) ⇒ ∃ b ∈ X with a ∉ mu({a,b}).
    In,
    /// X ⊆ Y, X ∩ mu(Y) ≠ ∅ ⇒ mu(X) ⊆ mu(Y) ∩ X.
    RatM,
    /// Against an ordered partition A₁ < … < Aₖ of the universe:
    /// X meets Aᵢ and Aⱼ with i < j ⇒ mu(X) ∩ Aⱼ = ∅.
    Layered(Vec<ElemSet>),
    /// u ∈ mu(U), u ∈ Y − mu(Y) ⇒ mu(Y) ⊄ H(U,u).
    HullAnchored,
    /// u ∈ mu(U), u ∈ Y − mu(Y) ⇒ mu(Y) ⊄ H(U).
    Hull,
    /// The indexed cumulativity condition at index α.
    CumAlpha(usize),
    /// Its transitive variant (weaker hypothesis set in the conclusion).
    CumtAlpha(usize),
}

impl Property {
    /// Stable ASCII token, also used by the text interface.
    pub fn token(&self) -> String {
        match self {
            Property::Subset => "muSubset".into(),
            Property::Empty => "muEmpty".into(),
            Property::EmptyFin => "muEmptyFin".into(),
            Property::Pr => "muPR".into(),
            Property::PrPrime => "muPRP".into(),
            Property::Or => "muOR".into(),
            Property::WOr => "muWOR".into(),
            Property::DisjOr => "muDisjOR".into(),
            Property::Cut => "muCUT".into(),
            Property::Cm => "muCM".into(),
            Property::ResM => "muResM".into(),
            Property::Cum => "muCUM".into(),
            Property::SubSup => "muSubSup".into(),
            Property::Eq => "muEq".into(),
            Property::EqPrime => "muEqP".into(),
            Property::Par => "muPar".into(),
            Property::Union => "muUnion".into(),
            Property::UnionPrime => "muUnionP".into(),
            Property::In => "muIn".into(),
            Property::RatM => "muRatM".into(),
            Property::Layered(blocks) => {
                let body: Vec<String> = blocks.iter().map(|b| join(b)).collect();
                format!("muLayered:{}", body.join("<"))
            }
            Property::HullAnchored => "HUu".into(),
            Property::Hull => "HU".into(),
            Property::CumAlpha(a) => format!("muCumA:{a}"),
            Property::CumtAlpha(a) => format!("muCumtA:{a}"),
        }
    }
}

impl std::fmt::Display for Property {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.token())
    }
}

impl std::str::FromStr for Property {
    type Err = String;

    fn from_str(s: &str) -> Result<Property, String> {
        let parse_idx = |rest: &str| rest.parse::<usize>().map_err(|_| format!("bad index in {s}"));
        Ok(match s {
            "muSubset" => Property::Subset,
            "muEmpty" => Property::Empty,
            "muEmptyFin" => Property::EmptyFin,
            "muPR" => Property::Pr,
            "muPRP" => Property::PrPrime,
            "muOR" => Property::Or,
            "muWOR" => Property::WOr,
            "muDisjOR" => Property::DisjOr,
            "muCUT" => Property::Cut,
            "muCM" => Property::Cm,
            "muResM" => Property::ResM,
            "muCUM" => Property::Cum,
            "muSubSup" => Property::SubSup,
            "muEq" => Property::Eq,
            "muEqP" => Property::EqPrime,
            "muPar" => Property::Par,
            "muUnion" => Property::Union,
            "muUnionP" => Property::UnionPrime,
            "muIn" => Property::In,
            "muRatM" => Property::RatM,
            "HUu" => Property::HullAnchored,
            "HU" => Property::Hull,
            _ => {
                if let Some(rest) = s.strip_prefix("muCumtA:") {
                    Property::CumtAlpha(parse_idx(rest)?)
                } else if let Some(rest) = s.strip_prefix("muCumA:") {
                    Property::CumAlpha(parse_idx(rest)?)
                } else if let Some(rest) = s.strip_prefix("muLayered:") {
                    let blocks: Vec<ElemSet> = rest
                        .split('<')
                        .map(|b| b.split(',').filter(|e| !e.is_empty()).map(String::from).collect())
                        .collect();
                    Property::Layered(blocks)
                } else {
                    return Err(format!("unknown property token {s}"));
                }
            }
        })
    }
}

/// A concrete violating instantiation: the sets (in formula order) and
/// any elements that pin down the failure.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Witness {
    pub sets: Vec<ElemSet>,
    pub elems: Vec<Elem>,
}

impl std::fmt::Display for Witness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let sets: Vec<String> = self.sets.iter().map(|s| format!("{{{}}}", join(s))).collect();
        write!(f, "{}", sets.join(" "))?;
        if !self.elems.is_empty() {
            write!(f, " @ {}", self.elems.join(","))?;
        }
        Ok(())
    }
}

/// Outcome of a property or rule check.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CheckResult {
    pub holds: bool,
    pub witness: Option<Witness>,
}

impl CheckResult {
    fn pass() -> CheckResult {
        CheckResult { holds: true, witness: None }
    }

    fn fail(sets: Vec<ElemSet>, elems: Vec<Elem>) -> CheckResult {
        CheckResult { holds: false, witness: Some(Witness { sets, elems }) }
    }
}

/// How to treat an instance whose evaluation needs a set outside the
/// domain: the public checker reports it, the search harness (which
/// pre-filters domains by the required closure) skips the instance.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Missing {
    Report,
    Skip,
}

/// Check one property against a choice function by exhaustive
/// quantification over the domain.  The first violation in canonical
/// set order is returned as the witness.
pub fn check(f: &ChoiceFunction, p: &Property) -> Result<CheckResult, ChoiceError> {
    check_impl(f, p, Missing::Report)
}

fn check_impl(f: &ChoiceFunction, p: &Property, miss: Missing) -> Result<CheckResult, ChoiceError> {
    let members: Vec<&ElemSet> = f.domain().collect();
    // Resolve mu on a derived set, distinguishing "outside the domain"
    // per the chosen policy.
    let need = |s: ElemSet| -> Result<Option<(ElemSet, ElemSet)>, ChoiceError> {
        match f.mu(&s) {
            Some(v) => Ok(Some((s, v.clone()))),
            None => match miss {
                Missing::Report => Err(ChoiceError::DomainClosure { property: p.token(), set: s }),
                Missing::Skip => Ok(None),
            },
        }
    };

    match p {
        Property::Subset => {
            for x in &members {
                let v = f.mu(x).unwrap();
                if let Some(e) = v.difference(x).next() {
                    return Ok(CheckResult::fail(vec![(*x).clone()], vec![e.clone()]));
                }
            }
        }
        Property::Empty => {
            for x in &members {
                if f.mu(x).unwrap().is_empty() && !x.is_empty() {
                    return Ok(CheckResult::fail(vec![(*x).clone()], vec![]));
                }
            }
        }
        Property::EmptyFin => {
            for x in &members {
                if !x.is_empty() && f.mu(x).unwrap().is_empty() {
                    return Ok(CheckResult::fail(vec![(*x).clone()], vec![]));
                }
            }
        }
        Property::Pr => {
            for x in &members {
                for y in &members {
                    if !x.is_subset(y) {
                        continue;
                    }
                    let over: ElemSet = f.mu(y).unwrap() & *x;
                    if let Some(e) = over.difference(f.mu(x).unwrap()).next() {
                        return Ok(CheckResult::fail(
                            vec![(*x).clone(), (*y).clone()],
                            vec![e.clone()],
                        ));
                    }
                }
            }
        }
        Property::PrPrime => {
            for x in &members {
                for y in &members {
                    let over: ElemSet = f.mu(x).unwrap() & y;
                    if over.is_empty() {
                        continue;
                    }
                    let Some((_, inner)) = need(*x & *y)? else { continue };
                    if let Some(e) = over.difference(&inner).next() {
                        return Ok(CheckResult::fail(
                            vec![(*x).clone(), (*y).clone()],
                            vec![e.clone()],
                        ));
                    }
                }
            }
        }
        Property::Or | Property::WOr | Property::DisjOr | Property::Par => {
            for x in &members {
                for y in &members {
                    if matches!(p, Property::DisjOr) && !x.is_disjoint(y) {
                        continue;
                    }
                    let Some((_, both)) = need(*x | *y)? else { continue };
                    let mx = f.mu(x).unwrap();
                    let my = f.mu(y).unwrap();
                    let ok = match p {
                        Property::WOr => both.is_subset(&(mx | *y)),
                        Property::Par => both == *mx || both == *my || both == (mx | my),
                        _ => both.is_subset(&(mx | my)),
                    };
                    if !ok {
                        return Ok(CheckResult::fail(vec![(*x).clone(), (*y).clone()], vec![]));
                    }
                }
            }
        }
        Property::Cut | Property::Cm | Property::Cum => {
            for x in &members {
                for y in &members {
                    let mx = f.mu(x).unwrap();
                    if !(mx.is_subset(y) && y.is_subset(x)) {
                        continue;
                    }
                    let my = f.mu(y).unwrap();
                    let ok = match p {
                        Property::Cut => mx.is_subset(my),
                        Property::Cm => my.is_subset(mx),
                        _ => mx == my,
                    };
                    if !ok {
                        return Ok(CheckResult::fail(vec![(*x).clone(), (*y).clone()], vec![]));
                    }
                }
            }
        }
        Property::ResM => {
            let subs = subsets(&f.universe);
            for x in &members {
                let mx = f.mu(x).unwrap().clone();
                for a in &subs {
                    if !mx.is_subset(a) {
                        continue;
                    }
                    for b in &subs {
                        if !mx.is_subset(b) {
                            continue;
                        }
                        let Some((_, inner)) = need(*x & a)? else { continue };
                        if let Some(e) = inner.difference(b).next() {
                            return Ok(CheckResult::fail(
                                vec![(*x).clone(), a.clone(), b.clone()],
                                vec![e.clone()],
                            ));
                        }
                    }
                }
            }
        }
        Property::SubSup => {
            for x in &members {
                for y in &members {
                    let mx = f.mu(x).unwrap();
                    let my = f.mu(y).unwrap();
                    if mx.is_subset(y) && my.is_subset(x) && mx != my {
                        return Ok(CheckResult::fail(vec![(*x).clone(), (*y).clone()], vec![]));
                    }
                }
            }
        }
        Property::Eq | Property::RatM => {
            for x in &members {
                for y in &members {
                    if !x.is_subset(y) {
                        continue;
                    }
                    let my = f.mu(y).unwrap();
                    let meet: ElemSet = my & *x;
                    if meet.is_empty() {
                        continue;
                    }
                    let mx = f.mu(x).unwrap();
                    let ok = match p {
                        Property::Eq => *mx == meet,
                        _ => mx.is_subset(&meet),
                    };
                    if !ok {
                        return Ok(CheckResult::fail(vec![(*x).clone(), (*y).clone()], vec![]));
                    }
                }
            }
        }
        Property::EqPrime => {
            for y in &members {
                for x in &members {
                    let my = f.mu(y).unwrap();
                    let meet: ElemSet = my & *x;
                    if meet.is_empty() {
                        continue;
                    }
                    let Some((_, inner)) = need(*y & *x)? else { continue };
                    if inner != meet {
                        return Ok(CheckResult::fail(vec![(*y).clone(), (*x).clone()], vec![]));
                    }
                }
            }
        }
        Property::Union | Property::UnionPrime => {
            for x in &members {
                for y in &members {
                    let mx = f.mu(x).unwrap();
                    let my = f.mu(y).unwrap();
                    let lost: ElemSet = &(*x - mx) & my;
                    if lost.is_empty() {
                        continue;
                    }
                    let Some((_, both)) = need(*x | *y)? else { continue };
                    let ok = match p {
                        Property::Union => (&both & *y).is_empty(),
                        _ => both == *mx,
                    };
                    if !ok {
                        return Ok(CheckResult::fail(vec![(*x).clone(), (*y).clone()], vec![]));
                    }
                }
            }
        }
        Property::In => {
            for x in &members {
                let mx = f.mu(x).unwrap();
                for a in x.difference(mx) {
                    let mut rescued = false;
                    let mut missing = None;
                    for b in x.iter() {
                        let pair: ElemSet = [a.clone(), b.clone()].into_iter().collect();
                        match f.mu(&pair) {
                            Some(v) if !v.contains(a) => {
                                rescued = true;
                                break;
                            }
                            Some(_) => {}
                            None => missing = Some(pair),
                        }
                    }
                    if !rescued {
                        if let Some(pair) = missing {
                            match miss {
                                Missing::Report => {
                                    return Err(ChoiceError::DomainClosure {
                                        property: p.token(),
                                        set: pair,
                                    })
                                }
                                // Without the pair sets the instance is
                                // undecided; do not fabricate a failure.
                                Missing::Skip => continue,
                            }
                        }
                        return Ok(CheckResult::fail(vec![(*x).clone()], vec![a.clone()]));
                    }
                }
            }
        }
        Property::Layered(blocks) => {
            validate_partition(&f.universe, blocks)?;
            for x in &members {
                let mx = f.mu(x).unwrap();
                for (i, low) in blocks.iter().enumerate() {
                    if x.is_disjoint(low) {
                        continue;
                    }
                    for high in blocks.iter().skip(i + 1) {
                        if x.is_disjoint(high) {
                            continue;
                        }
                        let stuck: ElemSet = mx & high;
                        if let Some(e) = stuck.iter().next() {
                            return Ok(CheckResult::fail(
                                vec![(*x).clone(), low.clone(), high.clone()],
                                vec![e.clone()],
                            ));
                        }
                    }
                }
            }
        }
        Property::HullAnchored | Property::Hull => {
            let anchored = matches!(p, Property::HullAnchored);
            for u in &members {
                let mu_u = f.mu(u).unwrap().clone();
                for a in &mu_u {
                    let trace = hull(f, u, anchored.then_some(a))?;
                    for y in &members {
                        if y.contains(a) && !f.mu(y).unwrap().contains(a) {
                            if f.mu(y).unwrap().is_subset(trace.fixpoint()) {
                                return Ok(CheckResult::fail(
                                    vec![(*u).clone(), (*y).clone()],
                                    vec![a.clone()],
                                ));
                            }
                        }
                    }
                }
            }
        }
        Property::CumAlpha(alpha) | Property::CumtAlpha(alpha) => {
            let transitive = matches!(p, Property::CumtAlpha(_));
            return cum_alpha_impl(f, *alpha, transitive);
        }
    }
    Ok(CheckResult::pass())
}

fn validate_partition(universe: &ElemSet, blocks: &[ElemSet]) -> Result<(), ChoiceError> {
    let mut seen = ElemSet::new();
    for b in blocks {
        if b.is_empty() {
            return Err(ChoiceError::BadPartition("empty block".into()));
        }
        if !seen.is_disjoint(b) {
            return Err(ChoiceError::BadPartition("blocks overlap".into()));
        }
        seen.extend(b.iter().cloned());
    }
    if &seen != universe {
        return Err(ChoiceError::BadPartition("blocks do not cover the universe".into()));
    }
    Ok(())
}

/// The staged hull of a domain member: `H₀ = U`, and each later stage
/// adds every domain set whose choice lies inside the previous stage
/// (restricted, when an anchor `u` is given, to sets containing `u`).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HullTrace {
    base: ElemSet,
    anchor: Option<Elem>,
    stages: Vec<ElemSet>,
}

impl HullTrace {
    pub fn base(&self) -> &ElemSet {
        &self.base
    }

    pub fn anchor(&self) -> Option<&Elem> {
        self.anchor.as_ref()
    }

    pub fn stages(&self) -> &[ElemSet] {
        &self.stages
    }

    pub fn fixpoint(&self) -> &ElemSet {
        self.stages.last().unwrap()
    }
}

/// Compute the hull trace of `base` under `f`, optionally anchored at
/// an element that every added set must contain.
pub fn hull(
    f: &ChoiceFunction,
    base: &ElemSet,
    anchor: Option<&Elem>,
) -> Result<HullTrace, ChoiceError> {
    if !f.contains(base) {
        return Err(ChoiceError::UnknownSet(base.clone()));
    }
    if let Some(u) = anchor {
        if !f.universe.contains(u) {
            return Err(ChoiceError::UnknownElement(u.clone()));
        }
    }
    let mut stages = vec![base.clone()];
    loop {
        let current = stages.last().unwrap();
        let mut next = current.clone();
        for x in f.domain() {
            if anchor.is_none_or(|u| x.contains(u)) && f.mu(x).unwrap().is_subset(current) {
                next.extend(x.iter().cloned());
            }
        }
        if &next == current {
            return Ok(HullTrace { base: base.clone(), anchor: anchor.cloned(), stages });
        }
        stages.push(next);
    }
}

/// Largest index accepted by [`check_cum_alpha`]; sequence enumeration
/// is exponential in the index.
pub const MAX_CUM_ALPHA: usize = 4;

/// Check the indexed cumulativity condition at `alpha` (or its
/// transitive variant): for every `U` and every domain sequence
/// `X₀, …, X_α` with `mu(X_β) ⊆ U ∪ X₀ ∪ … ∪ X_{β−1}` for all `β`,
/// the conclusion `⋂ X_γ ∩ mu(U) ⊆ mu(X_α)` holds (the transitive
/// variant intersects with `X_α` only).
pub fn check_cum_alpha(
    f: &ChoiceFunction,
    alpha: usize,
    transitive: bool,
) -> Result<CheckResult, ChoiceError> {
    if alpha > MAX_CUM_ALPHA {
        return Err(ChoiceError::BoundExceeded { requested: alpha, max: MAX_CUM_ALPHA });
    }
    cum_alpha_impl(f, alpha, transitive)
}

fn cum_alpha_impl(
    f: &ChoiceFunction,
    alpha: usize,
    transitive: bool,
) -> Result<CheckResult, ChoiceError> {
    let members: Vec<&ElemSet> = f.domain().collect();
    if members.is_empty() {
        return Ok(CheckResult::pass());
    }
    for u in &members {
        let mu_u = f.mu(u).unwrap();
        let mut idx = vec![0usize; alpha + 1];
        loop {
            let seq: Vec<&ElemSet> = idx.iter().map(|i| members[*i]).collect();
            let mut reach = (*u).clone();
            let mut premise = true;
            for x in &seq {
                if !f.mu(x).unwrap().is_subset(&reach) {
                    premise = false;
                    break;
                }
                reach.extend(x.iter().cloned());
            }
            if premise {
                let last = seq.last().unwrap();
                let mut lhs: ElemSet = if transitive {
                    *last & mu_u
                } else {
                    let mut acc = (*seq[0]).clone();
                    for x in &seq[1..] {
                        acc = &acc & *x;
                    }
                    &acc & mu_u
                };
                lhs = &lhs - f.mu(last).unwrap();
                if let Some(e) = lhs.iter().next() {
                    let mut sets = vec![(*u).clone()];
                    sets.extend(seq.iter().map(|x| (*x).clone()));
                    return Ok(CheckResult::fail(sets, vec![e.clone()]));
                }
            }
            // advance the index vector
            let mut k = 0;
            loop {
                if k == idx.len() {
                    break;
                }
                idx[k] += 1;
                if idx[k] < members.len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == idx.len() {
                break;
            }
        }
    }
    Ok(CheckResult::pass())
}

/// An abstract size system: a family of nonempty reference sets, each
/// carrying an explicit ideal of "small" subsets.  Big ("filter") and
/// medium sets are derived by duality: `A` is big in `X` iff `X − A`
/// is small, and medium iff not small.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct SizeSystem {
    universe: ElemSet,
    ideal: BTreeMap<ElemSet, BTreeSet<ElemSet>>,
}

impl SizeSystem {
    pub fn new(
        universe: ElemSet,
        ideal: BTreeMap<ElemSet, BTreeSet<ElemSet>>,
    ) -> Result<SizeSystem, ChoiceError> {
        for (x, fam) in &ideal {
            if x.is_empty() {
                return Err(ChoiceError::BadFunction(
                    "the empty set cannot carry an ideal".into(),
                ));
            }
            if !x.is_subset(&universe) {
                return Err(ChoiceError::BadFunction(format!(
                    "reference set {{{}}} is not a subset of the universe",
                    join(x)
                )));
            }
            for a in fam {
                if !a.is_subset(x) {
                    return Err(ChoiceError::BadFunction(format!(
                        "small set {{{}}} is not a subset of {{{}}}",
                        join(a),
                        join(x)
                    )));
                }
            }
        }
        Ok(SizeSystem { universe, ideal })
    }

    pub fn universe(&self) -> &ElemSet {
        &self.universe
    }

    pub fn domain(&self) -> impl Iterator<Item = &ElemSet> {
        self.ideal.keys()
    }

    pub fn ideal(&self, x: &ElemSet) -> Option<&BTreeSet<ElemSet>> {
        self.ideal.get(x)
    }

    /// Is `a` small in `x`?  `None` when `x` carries no ideal.
    pub fn small(&self, x: &ElemSet, a: &ElemSet) -> Option<bool> {
        self.ideal.get(x).map(|fam| fam.contains(a))
    }

    /// Is `a` big in `x` (its complement in `x` is small)?
    pub fn big(&self, x: &ElemSet, a: &ElemSet) -> Option<bool> {
        self.small(x, &(x - a))
    }

    /// Is `a` medium in `x` (not small)?
    pub fn medium(&self, x: &ElemSet, a: &ElemSet) -> Option<bool> {
        self.small(x, a).map(|s| !s)
    }

    /// The derived filter of `x`: all big subsets.
    pub fn filter(&self, x: &ElemSet) -> Option<BTreeSet<ElemSet>> {
        self.ideal.get(x).map(|fam| fam.iter().map(|a| x - a).collect())
    }
}

/// The coherence rules checkable on a size system.  Instances that
/// would need an ideal on a set outside the domain are skipped: the
/// rules quantify over the explicitly given reference sets only.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum SizeRule {
    /// ∅ is small in every X.
    Opt,
    /// Subsets of small sets are small.
    InnerMono,
    /// X ⊆ Y ⇒ small-in-X sets are small in Y.
    OuterMonoIdeal,
    /// X ⊆ Y ⇒ big-in-Y subsets of X are big in X.
    OuterMonoFilter,
    /// Disjoint unions of small sets are small in the union.
    DisjUnion,
    /// No n small sets cover X.
    NStar(usize),
    /// Small sets are closed under binary union.
    UnionClosed,
    /// A big-in chain of length n ends medium: X₁ big in X₂, …,
    /// X_{n−1} big in Xₙ ⇒ X₁ medium in Xₙ.
    MPlusN(usize),
    /// Medium robustness, variants 1–4.
    MPlusOmega(u8),
    /// Strong medium robustness, variants 1–3.
    MPlusPlus(u8),
    /// Conjunction rule at width n for the induced consequence
    /// relation (A ⊨ B iff A − B is small in A).
    AndN(usize),
    /// Disjunction rule at width n for the induced consequence relation.
    OrN(usize),
    /// Cautious-monotony rule at width n for the induced consequence
    /// relation.
    CmN(usize),
}

impl SizeRule {
    pub fn token(&self) -> String {
        match self {
            SizeRule::Opt => "opt".into(),
            SizeRule::InnerMono => "iM".into(),
            SizeRule::OuterMonoIdeal => "eMI".into(),
            SizeRule::OuterMonoFilter => "eMF".into(),
            SizeRule::DisjUnion => "iUnionDisj".into(),
            SizeRule::NStar(n) => format!("nStar:{n}"),
            SizeRule::UnionClosed => "iOmega".into(),
            SizeRule::MPlusN(n) => format!("mPlusN:{n}"),
            SizeRule::MPlusOmega(k) => format!("mPlusOmega:{k}"),
            SizeRule::MPlusPlus(k) => format!("mPlusPlus:{k}"),
            SizeRule::AndN(n) => format!("andN:{n}"),
            SizeRule::OrN(n) => format!("orN:{n}"),
            SizeRule::CmN(n) => format!("cmN:{n}"),
        }
    }
}

impl std::fmt::Display for SizeRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.token())
    }
}

impl std::str::FromStr for SizeRule {
    type Err = String;

    fn from_str(s: &str) -> Result<SizeRule, String> {
        let idx = |rest: &str| rest.parse::<usize>().map_err(|_| format!("bad index in {s}"));
        Ok(match s {
            "opt" => SizeRule::Opt,
            "iM" => SizeRule::InnerMono,
            "eMI" => SizeRule::OuterMonoIdeal,
            "eMF" => SizeRule::OuterMonoFilter,
            "iUnionDisj" => SizeRule::DisjUnion,
            "iOmega" => SizeRule::UnionClosed,
            _ => {
                if let Some(rest) = s.strip_prefix("nStar:") {
                    SizeRule::NStar(idx(rest)?)
                } else if let Some(rest) = s.strip_prefix("mPlusN:") {
                    SizeRule::MPlusN(idx(rest)?)
                } else if let Some(rest) = s.strip_prefix("mPlusOmega:") {
                    SizeRule::MPlusOmega(idx(rest)? as u8)
                } else if let Some(rest) = s.strip_prefix("mPlusPlus:") {
                    SizeRule::MPlusPlus(idx(rest)? as u8)
                } else if let Some(rest) = s.strip_prefix("andN:") {
                    SizeRule::AndN(idx(rest)?)
                } else if let Some(rest) = s.strip_prefix("orN:") {
                    SizeRule::OrN(idx(rest)?)
                } else if let Some(rest) = s.strip_prefix("cmN:") {
                    SizeRule::CmN(idx(rest)?)
                } else {
                    return Err(format!("unknown size rule token {s}"));
                }
            }
        })
    }
}

/// Check one rule against a size system by exhaustive quantification
/// over the domain (and, where the rule mentions arbitrary subsets,
/// over the power set of the relevant reference set).
pub fn check_size_rule(s: &SizeSystem, rule: &SizeRule) -> Result<CheckResult, ChoiceError> {
    match rule {
        SizeRule::NStar(n) | SizeRule::MPlusN(n) | SizeRule::AndN(n) | SizeRule::OrN(n)
        | SizeRule::CmN(n) => {
            let floor = if matches!(rule, SizeRule::NStar(_)) { 1 } else { 2 };
            if !(floor..=6).contains(n) {
                return Err(ChoiceError::BoundExceeded { requested: *n, max: 6 });
            }
        }
        SizeRule::MPlusOmega(k) => {
            if !(1..=4).contains(k) {
                return Err(ChoiceError::BoundExceeded { requested: *k as usize, max: 4 });
            }
        }
        SizeRule::MPlusPlus(k) => {
            if !(1..=3).contains(k) {
                return Err(ChoiceError::BoundExceeded { requested: *k as usize, max: 3 });
            }
        }
        _ => {}
    }
    let members: Vec<&ElemSet> = s.domain().collect();
    let fail = |sets: Vec<ElemSet>| Ok(CheckResult::fail(sets, vec![]));
    match rule {
        SizeRule::Opt => {
            for x in &members {
                if s.small(x, &ElemSet::new()) != Some(true) {
                    return fail(vec![(*x).clone()]);
                }
            }
        }
        SizeRule::InnerMono => {
            for x in &members {
                for b in s.ideal(x).unwrap().clone() {
                    for a in subsets(&b) {
                        if s.small(x, &a) != Some(true) {
                            return fail(vec![(*x).clone(), b.clone(), a]);
                        }
                    }
                }
            }
        }
        SizeRule::OuterMonoIdeal => {
            for x in &members {
                for y in &members {
                    if !x.is_subset(y) {
                        continue;
                    }
                    for a in s.ideal(x).unwrap() {
                        if s.small(y, a) != Some(true) {
                            return fail(vec![(*x).clone(), (*y).clone(), a.clone()]);
                        }
                    }
                }
            }
        }
        SizeRule::OuterMonoFilter => {
            for x in &members {
                for y in &members {
                    if !x.is_subset(y) {
                        continue;
                    }
                    for a in s.filter(y).unwrap() {
                        if a.is_subset(x) && s.big(x, &a) != Some(true) {
                            return fail(vec![(*x).clone(), (*y).clone(), a.clone()]);
                        }
                    }
                }
            }
        }
        SizeRule::DisjUnion => {
            for x in &members {
                for y in &members {
                    if !x.is_disjoint(y) {
                        continue;
                    }
                    let both: ElemSet = *x | *y;
                    if !s.ideal.contains_key(&both) {
                        continue;
                    }
                    for a in s.ideal(x).unwrap() {
                        for b in s.ideal(y).unwrap() {
                            if s.small(&both, &(a | b)) != Some(true) {
                                return fail(vec![
                                    (*x).clone(),
                                    (*y).clone(),
                                    a.clone(),
                                    b.clone(),
                                ]);
                            }
                        }
                    }
                }
            }
        }
        SizeRule::NStar(n) => {
            for x in &members {
                let fam: Vec<&ElemSet> = s.ideal(x).unwrap().iter().collect();
                if fam.is_empty() {
                    continue;
                }
                let mut idx = vec![0usize; *n];
                loop {
                    let mut cover = ElemSet::new();
                    for i in &idx {
                        cover.extend(fam[*i].iter().cloned());
                    }
                    if cover == **x {
                        let mut sets = vec![(*x).clone()];
                        sets.extend(idx.iter().map(|i| fam[*i].clone()));
                        return fail(sets);
                    }
                    if !advance(&mut idx, fam.len()) {
                        break;
                    }
                }
            }
        }
        SizeRule::UnionClosed => {
            for x in &members {
                for a in s.ideal(x).unwrap() {
                    for b in s.ideal(x).unwrap() {
                        if s.small(x, &(a | b)) != Some(true) {
                            return fail(vec![(*x).clone(), a.clone(), b.clone()]);
                        }
                    }
                }
            }
        }
        SizeRule::MPlusN(n) => {
            // chain X₂ … Xₙ from the domain, X₁ an arbitrary subset
            let mut idx = vec![0usize; *n - 1];
            if members.is_empty() {
                return Ok(CheckResult::pass());
            }
            loop {
                let chain: Vec<&ElemSet> = idx.iter().map(|i| members[*i]).collect();
                let linked = chain
                    .windows(2)
                    .all(|w| w[0].is_subset(w[1]) && s.big(w[1], w[0]) == Some(true));
                if linked {
                    for x1 in subsets(chain[0]) {
                        if s.big(chain[0], &x1) == Some(true)
                            && s.medium(chain[chain.len() - 1], &x1) != Some(true)
                        {
                            let mut sets = vec![x1];
                            sets.extend(chain.iter().map(|x| (*x).clone()));
                            return fail(sets);
                        }
                    }
                }
                if !advance(&mut idx, members.len()) {
                    break;
                }
            }
        }
        SizeRule::MPlusOmega(k) | SizeRule::MPlusPlus(k) => {
            let strong = matches!(rule, SizeRule::MPlusPlus(_));
            match (strong, k) {
                (false, 4) | (true, 1) | (true, 2) => {
                    // difference forms: A, B ⊆ X, conclusion in X − B
                    for x in &members {
                        for a in subsets(x) {
                            for b in subsets(x) {
                                let rest: ElemSet = *x - &b;
                                if !s.ideal.contains_key(&rest) {
                                    continue;
                                }
                                let (pre_a, pre_b) = match (strong, k) {
                                    (false, _) => (
                                        s.small(x, &a) == Some(true),
                                        s.small(x, &b) == Some(true),
                                    ),
                                    (_, 1) => (
                                        s.small(x, &a) == Some(true),
                                        s.big(x, &b) == Some(false),
                                    ),
                                    _ => (
                                        s.big(x, &a) == Some(true),
                                        s.big(x, &b) == Some(false),
                                    ),
                                };
                                if !(pre_a && pre_b) {
                                    continue;
                                }
                                let diff: ElemSet = &a - &b;
                                let ok = if strong && *k == 2 {
                                    s.big(&rest, &diff) == Some(true)
                                } else {
                                    s.small(&rest, &diff) == Some(true)
                                };
                                if !ok {
                                    return fail(vec![(*x).clone(), a, b]);
                                }
                            }
                        }
                    }
                }
                _ => {
                    // transfer forms: A ⊆ X ⊆ Y, step through X
                    for x in &members {
                        for y in &members {
                            if !x.is_subset(y) {
                                continue;
                            }
                            for a in subsets(x) {
                                let (pre_a, pre_x, concl) = match (strong, k) {
                                    (false, 1) => (
                                        s.big(x, &a),
                                        s.medium(y, x),
                                        s.medium(y, &a),
                                    ),
                                    (false, 2) => (
                                        s.medium(x, &a),
                                        s.big(y, x),
                                        s.medium(y, &a),
                                    ),
                                    (false, _) => (s.big(x, &a), s.big(y, x), s.big(y, &a)),
                                    _ => (s.medium(x, &a), s.medium(y, x), s.medium(y, &a)),
                                };
                                if pre_a == Some(true)
                                    && pre_x == Some(true)
                                    && concl != Some(true)
                                {
                                    return fail(vec![(*x).clone(), (*y).clone(), a]);
                                }
                            }
                        }
                    }
                }
            }
        }
        SizeRule::AndN(n) => {
            let subs = subsets(&s.universe);
            for x in &members {
                let mut idx = vec![0usize; *n];
                loop {
                    let bs: Vec<&ElemSet> = idx.iter().map(|i| &subs[*i]).collect();
                    if bs.iter().all(|b| s.small(x, &(*x - *b)) == Some(true)) {
                        let mut meet = (*x).clone();
                        for b in &bs {
                            meet = &meet & *b;
                        }
                        if meet.is_empty() {
                            let mut sets = vec![(*x).clone()];
                            sets.extend(bs.iter().map(|b| (*b).clone()));
                            return fail(sets);
                        }
                    }
                    if !advance(&mut idx, subs.len()) {
                        break;
                    }
                }
            }
        }
        SizeRule::OrN(n) => {
            let subs = subsets(&s.universe);
            let mut idx = vec![0usize; *n - 1];
            if members.is_empty() {
                return Ok(CheckResult::pass());
            }
            loop {
                let xs: Vec<&ElemSet> = idx.iter().map(|i| members[*i]).collect();
                let mut all: ElemSet = ElemSet::new();
                for x in &xs {
                    all.extend(x.iter().cloned());
                }
                if s.ideal.contains_key(&all) {
                    for b in &subs {
                        if xs.iter().all(|x| s.small(x, &(*x - b)) == Some(true))
                            && s.small(&all, &(&all & b)) == Some(true)
                        {
                            let mut sets: Vec<ElemSet> =
                                xs.iter().map(|x| (*x).clone()).collect();
                            sets.push(b.clone());
                            return fail(sets);
                        }
                    }
                }
                if !advance(&mut idx, members.len()) {
                    break;
                }
            }
        }
        SizeRule::CmN(n) => {
            let subs = subsets(&s.universe);
            for x in &members {
                let mut idx = vec![0usize; *n - 1];
                loop {
                    let bs: Vec<&ElemSet> = idx.iter().map(|i| &subs[*i]).collect();
                    if bs.iter().all(|b| s.small(x, &(*x - *b)) == Some(true)) {
                        let mut narrowed = (*x).clone();
                        for b in &bs[..bs.len() - 1] {
                            narrowed = &narrowed & *b;
                        }
                        let last = bs[bs.len() - 1];
                        if s.ideal.contains_key(&narrowed)
                            && s.small(&narrowed, &(&narrowed & last)) == Some(true)
                        {
                            let mut sets = vec![(*x).clone()];
                            sets.extend(bs.iter().map(|b| (*b).clone()));
                            return fail(sets);
                        }
                    }
                    if !advance(&mut idx, subs.len()) {
                        break;
                    }
                }
            }
        }
    }
    Ok(CheckResult::pass())
}

/// Advance a mixed-radix index vector; false when it wraps to zero.
fn advance(idx: &mut [usize], radix: usize) -> bool {
    for slot in idx.iter_mut() {
        *slot += 1;
        if *slot < radix {
            return true;
        }
        *slot = 0;
    }
    false
}

/// Closure requirements imposed on candidate domains during search.
#[derive(Clone, Copy, Default, PartialEq, Eq, Debug)]
pub struct Closures {
    pub intersection: bool,
    pub union: bool,
    pub difference: bool,
    pub singletons: bool,
}

impl Closures {
    pub fn none() -> Closures {
        Closures::default()
    }

    pub fn intersection() -> Closures {
        Closures { intersection: true, ..Closures::default() }
    }

    pub fn union() -> Closures {
        Closures { union: true, ..Closures::default() }
    }

    fn admits(&self, domain: &BTreeSet<ElemSet>) -> bool {
        let has = |s: &ElemSet| domain.contains(s);
        let pairs_ok = |op: fn(&ElemSet, &ElemSet) -> ElemSet| {
            domain.iter().all(|a| domain.iter().all(|b| has(&op(a, b))))
        };
        (!self.intersection || pairs_ok(|a, b| a & b))
            && (!self.union || pairs_ok(|a, b| a | b))
            && (!self.difference || pairs_ok(|a, b| a - b))
    }

    fn admits_with_universe(&self, domain: &BTreeSet<ElemSet>, universe: &ElemSet) -> bool {
        self.admits(domain)
            && (!self.singletons
                || universe.iter().all(|e| domain.contains(&ElemSet::from([e.clone()]))))
    }
}

/// Configuration for [`search_counterexample`]: exhaustive enumeration
/// up to `exhaustive_universe` elements (capped at 3), seeded random
/// sampling for larger universes up to `max_universe`.
#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub max_universe: usize,
    pub exhaustive_universe: usize,
    pub samples: usize,
    pub seed: u64,
    pub closures: Closures,
}

impl Default for SearchConfig {
    fn default() -> SearchConfig {
        SearchConfig {
            max_universe: 3,
            exhaustive_universe: 3,
            samples: 500,
            seed: 0,
            closures: Closures::default(),
        }
    }
}

/// Result of a counterexample search over choice functions.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SearchOutcome {
    CounterExample { function: ChoiceFunction, witness: Witness },
    Exhausted { examined: u64 },
}

fn canonical_elems(k: usize) -> ElemSet {
    (0..k).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
}

/// Search for a choice function that satisfies every hypothesis
/// property but violates the conclusion.  Universes up to the
/// exhaustive bound are enumerated completely (domains in increasing
/// size, values by backtracking with hypothesis pruning); larger
/// universes are sampled with a seeded generator.
pub fn search_counterexample(
    hypothesis: &[Property],
    conclusion: &Property,
    config: &SearchConfig,
) -> Result<SearchOutcome, ChoiceError> {
    let mut examined = 0u64;
    let restrict = hypothesis.contains(&Property::Subset);
    // Hull-style hypotheses are not stable under domain growth, so they
    // cannot prune partial assignments.
    let prunable: Vec<&Property> = hypothesis
        .iter()
        .filter(|p| !matches!(p, Property::Hull | Property::HullAnchored))
        .collect();

    let exhaustive = config.exhaustive_universe.min(3).min(config.max_universe);
    for k in 1..=exhaustive {
        let universe = canonical_elems(k);
        let subs = subsets(&universe);
        let mut masks: Vec<u32> = (0..1u32 << subs.len()).collect();
        masks.sort_by_key(|m| m.count_ones());
        for mask in masks {
            let domain: BTreeSet<ElemSet> = subs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, s)| s.clone())
                .collect();
            if !config.closures.admits_with_universe(&domain, &universe) {
                continue;
            }
            let mut order: Vec<ElemSet> = domain.iter().cloned().collect();
            order.sort_by_key(|s| std::cmp::Reverse(s.len()));
            let pools: Vec<Vec<ElemSet>> = order
                .iter()
                .map(|s| if restrict { subsets(s) } else { subs.clone() })
                .collect();
            let mut partial = ChoiceFunction { universe: universe.clone(), mu: BTreeMap::new() };
            if let Some(hit) = assign_and_check(
                &mut partial,
                &order,
                &pools,
                0,
                &prunable,
                hypothesis,
                conclusion,
                &mut examined,
            )? {
                return Ok(hit);
            }
        }
    }

    for k in (exhaustive + 1)..=config.max_universe {
        let universe = canonical_elems(k);
        let subs = subsets(&universe);
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ (k as u64).wrapping_mul(0x9e37));
        for _ in 0..config.samples {
            let size = rng.random_range(2..=4usize);
            let mut domain: BTreeSet<ElemSet> = (0..size)
                .map(|_| subs[rng.random_range(0..subs.len())].clone())
                .collect();
            close_domain(&mut domain, &universe, &config.closures);
            let mut mu = BTreeMap::new();
            for x in &domain {
                let pool: Vec<&Elem> =
                    if restrict { x.iter().collect() } else { universe.iter().collect() };
                let value: ElemSet =
                    pool.into_iter().filter(|_| rng.random_bool(0.5)).cloned().collect();
                mu.insert(x.clone(), value);
            }
            let f = ChoiceFunction::new(universe.clone(), mu)?;
            if let Some(hit) = judge(&f, hypothesis, conclusion, &mut examined)? {
                return Ok(hit);
            }
        }
    }
    Ok(SearchOutcome::Exhausted { examined })
}

fn close_domain(domain: &mut BTreeSet<ElemSet>, universe: &ElemSet, cl: &Closures) {
    if cl.singletons {
        for e in universe {
            domain.insert(ElemSet::from([e.clone()]));
        }
    }
    loop {
        let mut fresh: Vec<ElemSet> = Vec::new();
        for a in domain.iter() {
            for b in domain.iter() {
                if cl.intersection {
                    fresh.push(a & b);
                }
                if cl.union {
                    fresh.push(a | b);
                }
                if cl.difference {
                    fresh.push(a - b);
                }
            }
        }
        let before = domain.len();
        domain.extend(fresh);
        if domain.len() == before {
            return;
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn assign_and_check(
    f: &mut ChoiceFunction,
    order: &[ElemSet],
    pools: &[Vec<ElemSet>],
    depth: usize,
    prunable: &[&Property],
    hypothesis: &[Property],
    conclusion: &Property,
    examined: &mut u64,
) -> Result<Option<SearchOutcome>, ChoiceError> {
    if depth == order.len() {
        return judge(f, hypothesis, conclusion, examined);
    }
    let next = &order[depth];
    for value in &pools[depth] {
        f.mu.insert(next.clone(), value.clone());
        let viable = prunable
            .iter()
            .map(|p| check_impl(f, p, Missing::Skip))
            .collect::<Result<Vec<_>, _>>()?
            .iter()
            .all(|r| r.holds);
        if viable {
            if let Some(hit) = assign_and_check(
                f, order, pools, depth + 1, prunable, hypothesis, conclusion, examined,
            )? {
                return Ok(Some(hit));
            }
        }
        f.mu.remove(next);
    }
    Ok(None)
}

fn judge(
    f: &ChoiceFunction,
    hypothesis: &[Property],
    conclusion: &Property,
    examined: &mut u64,
) -> Result<Option<SearchOutcome>, ChoiceError> {
    for p in hypothesis {
        if !check_impl(f, p, Missing::Skip)?.holds {
            return Ok(None);
        }
    }
    *examined += 1;
    let res = check_impl(f, conclusion, Missing::Skip)?;
    if res.holds {
        Ok(None)
    } else {
        Ok(Some(SearchOutcome::CounterExample {
            function: f.clone(),
            witness: res.witness.unwrap(),
        }))
    }
}

/// Result of a counterexample search over size systems.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SizeSearchOutcome {
    CounterExample { system: SizeSystem, witness: Witness },
    Exhausted { examined: u64 },
}

/// Search exhaustively (universes of up to `max_universe` ≤ 2
/// elements) for a size system satisfying every hypothesis rule but
/// violating the conclusion.
pub fn search_size_counterexample(
    hypothesis: &[SizeRule],
    conclusion: &SizeRule,
    max_universe: usize,
) -> Result<SizeSearchOutcome, ChoiceError> {
    let mut examined = 0u64;
    for k in 1..=max_universe.min(2) {
        let universe = canonical_elems(k);
        let members: Vec<ElemSet> =
            subsets(&universe).into_iter().filter(|s| !s.is_empty()).collect();
        let mut masks: Vec<u32> = (0..1u32 << members.len()).collect();
        masks.sort_by_key(|m| m.count_ones());
        for mask in masks {
            let domain: Vec<ElemSet> = members
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, s)| s.clone())
                .collect();
            if let Some(hit) = assign_ideals(
                &universe,
                &domain,
                &mut BTreeMap::new(),
                hypothesis,
                conclusion,
                &mut examined,
            )? {
                return Ok(hit);
            }
        }
    }
    Ok(SizeSearchOutcome::Exhausted { examined })
}

fn assign_ideals(
    universe: &ElemSet,
    domain: &[ElemSet],
    assigned: &mut BTreeMap<ElemSet, BTreeSet<ElemSet>>,
    hypothesis: &[SizeRule],
    conclusion: &SizeRule,
    examined: &mut u64,
) -> Result<Option<SizeSearchOutcome>, ChoiceError> {
    let consistent = |s: &SizeSystem, rules: &[SizeRule]| -> Result<bool, ChoiceError> {
        for r in rules {
            if !check_size_rule(s, r)?.holds {
                return Ok(false);
            }
        }
        Ok(true)
    };
    if assigned.len() == domain.len() {
        let s = SizeSystem::new(universe.clone(), assigned.clone())?;
        if !consistent(&s, hypothesis)? {
            return Ok(None);
        }
        *examined += 1;
        let res = check_size_rule(&s, conclusion)?;
        return Ok(if res.holds {
            None
        } else {
            Some(SizeSearchOutcome::CounterExample { system: s, witness: res.witness.unwrap() })
        });
    }
    let next = &domain[assigned.len()];
    let pieces = subsets(next);
    for fam_mask in 0u32..1 << pieces.len() {
        let family: BTreeSet<ElemSet> = pieces
            .iter()
            .enumerate()
            .filter(|(i, _)| fam_mask & (1 << i) != 0)
            .map(|(_, s)| s.clone())
            .collect();
        assigned.insert(next.clone(), family);
        let partial = SizeSystem::new(universe.clone(), assigned.clone())?;
        if consistent(&partial, hypothesis)? {
            if let Some(hit) =
                assign_ideals(universe, domain, assigned, hypothesis, conclusion, examined)?
            {
                return Ok(Some(hit));
            }
        }
        assigned.remove(next);
    }
    Ok(None)
}

/// Small, hand-checked functions and systems exercising the edges of
/// the condition lattice.  They are used by regression tests and the
/// search harness examples.
pub mod fixtures {
    use super::*;

    pub fn set(items: &[&str]) -> ElemSet {
        items.iter().map(|s| s.to_string()).collect()
    }

    pub fn function(universe: &[&str], entries: &[(&[&str], &[&str])]) -> ChoiceFunction {
        let mu = entries.iter().map(|(x, v)| (set(x), set(v))).collect();
        ChoiceFunction::new(set(universe), mu).unwrap()
    }

    pub fn system(universe: &[&str], entries: &[(&[&str], &[&[&str]])]) -> SizeSystem {
        let ideal = entries
            .iter()
            .map(|(x, fams)| (set(x), fams.iter().map(|f| set(f)).collect()))
            .collect();
        SizeSystem::new(set(universe), ideal).unwrap()
    }

    /// Two overlapping four-element sets where shrinking to the chosen
    /// part is stable but the two choices disagree: cumulativity holds
    /// while the mutual-containment equality fails.
    pub fn cumulative_but_not_extensional() -> ChoiceFunction {
        function(
            &["a", "b", "c", "d"],
            &[(&["a", "b", "c"], &["a"]), (&["a", "b", "d"], &["a", "b"])],
        )
    }

    /// Identity on the full power set of {a,b,c} except that one pair
    /// drops an element: cumulativity survives, relativization fails.
    pub fn cum_without_pr() -> ChoiceFunction {
        let universe = set(&["a", "b", "c"]);
        let mut mu: BTreeMap<ElemSet, ElemSet> =
            subsets(&universe).into_iter().map(|x| (x.clone(), x)).collect();
        mu.insert(set(&["a", "b"]), set(&["b"]));
        ChoiceFunction::new(universe, mu).unwrap()
    }

    /// A non-transitive preference chain collapsed into a choice
    /// function: the staged cumulativity conditions hold up to depth
    /// `kappa - 1` (transitive form) but fail at depth `kappa`.
    /// Supported depths: 1 and 2.
    pub fn staged_cum_gap(kappa: usize) -> ChoiceFunction {
        match kappa {
            1 => function(
                &["a", "b", "c", "x0", "x0p", "x1", "x1p", "x2"],
                &[
                    (&["a", "c", "x0"], &["a", "c", "x0"]),
                    (&["c", "x0", "x0p", "x1"], &["c", "x0"]),
                    (&["a", "b", "c", "x1", "x1p", "x2"], &["a", "x1"]),
                    (&["c", "x0"], &["c", "x0"]),
                    (&["a", "c"], &["a", "c"]),
                    (&["c", "x1"], &["c", "x1"]),
                ],
            ),
            2 => function(
                &["a", "b", "c", "x0", "x0p", "x1", "x1p", "x2", "x2p", "x3"],
                &[
                    (&["a", "c", "x0"], &["a", "c", "x0"]),
                    (&["c", "x0", "x0p", "x1"], &["c", "x0"]),
                    (&["c", "x1", "x1p", "x2"], &["c", "x1"]),
                    (&["a", "b", "c", "x2", "x2p", "x3"], &["a", "x2"]),
                    (&["c", "x0"], &["c", "x0"]),
                    (&["c"], &["c"]),
                    (&["a", "c"], &["a", "c"]),
                    (&["c", "x1"], &["c", "x1"]),
                    (&["c", "x2"], &["c", "x2"]),
                ],
            ),
            _ => panic!("unsupported depth {kappa}"),
        }
    }

    /// A choice function representable only by a cyclic (hence
    /// non-transitive) preference, layered over {a,b} < {c}.
    pub fn layered_cycle() -> ChoiceFunction {
        function(
            &["a", "b", "c"],
            &[
                (&["a", "b", "c"], &["b"]),
                (&["a", "b"], &["a", "b"]),
                (&["a", "c"], &[]),
                (&["b", "c"], &["b"]),
            ],
        )
    }

    /// The ordered partition that goes with [`layered_cycle`].
    pub fn layered_cycle_blocks() -> Vec<ElemSet> {
        vec![set(&["a", "b"]), set(&["c"])]
    }

    /// A size system on `size` elements whose top set counts exactly
    /// the singletons as small while every proper subset counts only
    /// the empty set: `size - 1` small sets never cover the top, but
    /// `size` of them do.
    pub fn singleton_top_system(size: usize) -> SizeSystem {
        let universe: ElemSet = (1..=size).map(|i| format!("e{i}")).collect();
        let ideal = subsets(&universe)
            .into_iter()
            .filter(|s| !s.is_empty())
            .map(|x| {
                let mut fam = BTreeSet::from([ElemSet::new()]);
                if x == universe {
                    for e in &universe {
                        fam.insert(ElemSet::from([e.clone()]));
                    }
                }
                (x, fam)
            })
            .collect();
        SizeSystem::new(universe, ideal).unwrap()
    }

    /// Three systems on {a,b,c} separating the four medium-robustness
    /// variants: variant `k` of this fixture satisfies exactly the
    /// pattern documented in the tests.
    pub fn medium_robustness_variant(k: u8) -> SizeSystem {
        let universe = set(&["a", "b", "c"]);
        let top_filter: Vec<ElemSet> = match k {
            1 => vec![set(&["a", "c"]), set(&["b", "c"])],
            _ => vec![set(&["a", "b"]), set(&["a", "c"])],
        };
        let mut filters: BTreeMap<ElemSet, Vec<ElemSet>> = BTreeMap::new();
        for x in subsets(&universe).into_iter().filter(|s| !s.is_empty()) {
            filters.insert(x.clone(), vec![x]);
        }
        let mut top = top_filter;
        top.push(universe.clone());
        filters.insert(universe.clone(), top);
        match k {
            3 => {
                filters.insert(set(&["a", "b"]), vec![set(&["a"]), set(&["a", "b"])]);
                filters.insert(set(&["a", "c"]), vec![set(&["a"]), set(&["a", "c"])]);
            }
            _ => {
                filters.insert(set(&["a", "b"]), vec![set(&["a"]), set(&["a", "b"])]);
            }
        }
        from_filters(universe, filters)
    }

    /// Two systems on {x,y,z} showing that the two outer-monotony
    /// rules are independent: variant 1 satisfies the ideal form but
    /// not the filter form, variant 2 the other way round.
    pub fn monotony_split(k: u8) -> SizeSystem {
        let universe = set(&["x", "y", "z"]);
        let mut filters: BTreeMap<ElemSet, Vec<ElemSet>> = BTreeMap::new();
        for s in subsets(&universe).into_iter().filter(|s| !s.is_empty()) {
            filters.insert(s.clone(), vec![s]);
        }
        match k {
            1 => {
                let big: Vec<ElemSet> = subsets(&universe)
                    .into_iter()
                    .filter(|a| a.contains("z"))
                    .collect();
                filters.insert(universe.clone(), big);
            }
            _ => {
                filters.insert(set(&["x", "z"]), vec![set(&["z"]), set(&["x", "z"])]);
            }
        }
        from_filters(universe, filters)
    }

    fn from_filters(universe: ElemSet, filters: BTreeMap<ElemSet, Vec<ElemSet>>) -> SizeSystem {
        let ideal = filters
            .into_iter()
            .map(|(x, fam)| {
                let small: BTreeSet<ElemSet> = fam.iter().map(|a| &x - a).collect();
                (x, small)
            })
            .collect();
        SizeSystem::new(universe, ideal).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::{function, set};
    use super::*;
    use proptest::prelude::*;

    fn holds(f: &ChoiceFunction, p: Property) -> bool {
        check(f, &p).unwrap().holds
    }

    fn rule_holds(s: &SizeSystem, r: SizeRule) -> bool {
        check_size_rule(s, &r).unwrap().holds
    }

    #[test]
    fn identity_satisfies_minimality_conditions() {
        let f = ChoiceFunction::identity(set(&["a", "b", "c"]));
        for p in [Property::Subset, Property::Pr, Property::Cum, Property::Eq, Property::In] {
            assert!(holds(&f, p));
        }
    }

    #[test]
    fn stable_shrinking_does_not_force_agreement() {
        let f = fixtures::cumulative_but_not_extensional();
        assert!(holds(&f, Property::Subset));
        assert!(holds(&f, Property::Cum));
        let res = check(&f, &Property::SubSup).unwrap();
        assert!(!res.holds);
        assert_eq!(
            res.witness.unwrap().sets,
            vec![set(&["a", "b", "c"]), set(&["a", "b", "d"])]
        );
    }

    #[test]
    fn dropping_one_element_breaks_relativization_only() {
        let f = fixtures::cum_without_pr();
        let res = check(&f, &Property::Pr).unwrap();
        assert!(!res.holds);
        assert_eq!(res.witness.unwrap().sets, vec![set(&["a", "b"]), set(&["a", "b", "c"])]);
        assert!(holds(&f, Property::Subset));
        assert!(holds(&f, Property::Cum));
        assert!(holds(&f, Property::RatM));
        assert!(!check_cum_alpha(&f, 0, false).unwrap().holds);
    }

    #[test]
    fn union_conditions_need_a_union_closed_domain() {
        let f = fixtures::cumulative_but_not_extensional();
        assert!(matches!(
            check(&f, &Property::Or),
            Err(ChoiceError::DomainClosure { .. })
        ));
    }

    #[test]
    fn membership_condition_needs_pair_sets() {
        let f = function(&["a", "b", "c"], &[(&["a", "b", "c"], &["a"])]);
        assert!(matches!(check(&f, &Property::In), Err(ChoiceError::DomainClosure { .. })));
    }

    #[test]
    fn hull_of_identity_adds_nothing() {
        let f = ChoiceFunction::identity(set(&["a", "b", "c"]));
        let trace = hull(&f, &set(&["a", "b"]), Some(&"a".to_string())).unwrap();
        assert_eq!(trace.fixpoint(), &set(&["a", "b"]));
        assert_eq!(trace.stages().len(), 1);
    }

    #[test]
    fn hull_rejects_unknown_base() {
        let f = fixtures::cumulative_but_not_extensional();
        assert!(matches!(hull(&f, &set(&["a"]), None), Err(ChoiceError::UnknownSet(_))));
    }

    #[test]
    fn empty_choice_pulls_its_set_into_the_hull() {
        let f = function(
            &["a", "b"],
            &[(&["a"], &["a"]), (&["a", "b"], &[])],
        );
        let trace = hull(&f, &set(&["a"]), None).unwrap();
        assert_eq!(trace.fixpoint(), &set(&["a", "b"]));
    }

    #[test]
    fn staged_gap_breaks_the_anchored_hull_property() {
        let f = fixtures::staged_cum_gap(1);
        let res = check(&f, &Property::HullAnchored).unwrap();
        assert!(!res.holds);
        let w = res.witness.unwrap();
        assert_eq!(w.sets[0], set(&["a", "c", "x0"]));
        assert_eq!(w.sets[1], set(&["a", "b", "c", "x1", "x1p", "x2"]));
        assert_eq!(w.elems, vec!["c".to_string()]);
    }

    #[test]
    fn staged_gap_depth_two_separates_the_indexed_conditions() {
        let f = fixtures::staged_cum_gap(2);
        assert!(check_cum_alpha(&f, 1, true).unwrap().holds);
        assert!(holds(&f, Property::Subset));
        assert!(holds(&f, Property::Pr));
        assert!(holds(&f, Property::Cum));
        let res = check_cum_alpha(&f, 2, false).unwrap();
        assert!(!res.holds);
        assert_eq!(res.witness.unwrap().elems, vec!["c".to_string()]);
    }

    #[test]
    fn cum_alpha_bound_is_enforced() {
        let f = ChoiceFunction::identity(set(&["a"]));
        assert!(matches!(
            check_cum_alpha(&f, MAX_CUM_ALPHA + 1, false),
            Err(ChoiceError::BoundExceeded { .. })
        ));
    }

    #[test]
    fn layered_cycle_respects_its_layers() {
        let f = fixtures::layered_cycle();
        let blocks = fixtures::layered_cycle_blocks();
        assert!(holds(&f, Property::Layered(blocks)));
        assert!(holds(&f, Property::Subset));
        assert!(holds(&f, Property::Pr));
    }

    #[test]
    fn bad_partitions_are_rejected() {
        let f = fixtures::layered_cycle();
        let overlap = Property::Layered(vec![set(&["a", "b"]), set(&["b", "c"])]);
        assert!(matches!(check(&f, &overlap), Err(ChoiceError::BadPartition(_))));
        let gap = Property::Layered(vec![set(&["a"])]);
        assert!(matches!(check(&f, &gap), Err(ChoiceError::BadPartition(_))));
    }

    #[test]
    fn property_tokens_round_trip() {
        let all = [
            Property::Subset,
            Property::Empty,
            Property::EmptyFin,
            Property::Pr,
            Property::PrPrime,
            Property::Or,
            Property::WOr,
            Property::DisjOr,
            Property::Cut,
            Property::Cm,
            Property::ResM,
            Property::Cum,
            Property::SubSup,
            Property::Eq,
            Property::EqPrime,
            Property::Par,
            Property::Union,
            Property::UnionPrime,
            Property::In,
            Property::RatM,
            Property::Layered(vec![set(&["a", "b"]), set(&["c"])]),
            Property::HullAnchored,
            Property::Hull,
            Property::CumAlpha(2),
            Property::CumtAlpha(3),
        ];
        for p in all {
            assert_eq!(p.token().parse::<Property>().unwrap(), p);
        }
    }

    #[test]
    fn size_rule_tokens_round_trip() {
        let all = [
            SizeRule::Opt,
            SizeRule::InnerMono,
            SizeRule::OuterMonoIdeal,
            SizeRule::OuterMonoFilter,
            SizeRule::DisjUnion,
            SizeRule::NStar(3),
            SizeRule::UnionClosed,
            SizeRule::MPlusN(3),
            SizeRule::MPlusOmega(4),
            SizeRule::MPlusPlus(2),
            SizeRule::AndN(2),
            SizeRule::OrN(3),
            SizeRule::CmN(3),
        ];
        for r in all {
            assert_eq!(r.token().parse::<SizeRule>().unwrap(), r);
        }
    }

    #[test]
    fn filter_and_ideal_are_dual() {
        let s = fixtures::medium_robustness_variant(1);
        for x in s.domain() {
            for a in subsets(x) {
                assert_eq!(s.big(x, &a), s.small(x, &(x - &a)));
            }
        }
    }

    #[test]
    fn singleton_top_counts_to_its_size() {
        let s = fixtures::singleton_top_system(3);
        for r in [
            SizeRule::Opt,
            SizeRule::InnerMono,
            SizeRule::OuterMonoIdeal,
            SizeRule::OuterMonoFilter,
            SizeRule::NStar(1),
            SizeRule::NStar(2),
            SizeRule::OrN(3),
            SizeRule::CmN(3),
            SizeRule::MPlusN(3),
        ] {
            assert!(rule_holds(&s, r.clone()), "{r} should hold");
        }
        let res = check_size_rule(&s, &SizeRule::NStar(3)).unwrap();
        assert!(!res.holds);
        assert_eq!(res.witness.unwrap().sets[0], set(&["e1", "e2", "e3"]));
    }

    #[test]
    fn medium_robustness_variants_are_independent() {
        let patterns: [[bool; 4]; 3] = [
            [false, false, true, false],
            [true, false, false, false],
            [true, true, false, true],
        ];
        for (i, expect) in patterns.iter().enumerate() {
            let s = fixtures::medium_robustness_variant(i as u8 + 1);
            for r in [SizeRule::Opt, SizeRule::InnerMono, SizeRule::OuterMonoIdeal,
                      SizeRule::OuterMonoFilter] {
                assert!(rule_holds(&s, r.clone()), "variant {} basic rule {r}", i + 1);
            }
            for k in 1..=4u8 {
                assert_eq!(
                    rule_holds(&s, SizeRule::MPlusOmega(k)),
                    expect[k as usize - 1],
                    "variant {} robustness form {k}",
                    i + 1
                );
            }
        }
    }

    #[test]
    fn outer_monotony_rules_are_independent() {
        let a = fixtures::monotony_split(1);
        assert!(rule_holds(&a, SizeRule::Opt));
        assert!(rule_holds(&a, SizeRule::InnerMono));
        assert!(rule_holds(&a, SizeRule::OuterMonoIdeal));
        assert!(rule_holds(&a, SizeRule::UnionClosed));
        assert!(!rule_holds(&a, SizeRule::OuterMonoFilter));

        let b = fixtures::monotony_split(2);
        assert!(rule_holds(&b, SizeRule::Opt));
        assert!(rule_holds(&b, SizeRule::InnerMono));
        assert!(rule_holds(&b, SizeRule::OuterMonoFilter));
        assert!(!rule_holds(&b, SizeRule::OuterMonoIdeal));
    }

    #[test]
    fn outer_monotony_independence_found_by_search() {
        let base = [SizeRule::Opt, SizeRule::InnerMono, SizeRule::UnionClosed];
        let mut hyp = base.to_vec();
        hyp.push(SizeRule::OuterMonoIdeal);
        let via_ideal = search_size_counterexample(&hyp, &SizeRule::OuterMonoFilter, 2).unwrap();
        assert!(matches!(via_ideal, SizeSearchOutcome::CounterExample { .. }));

        let mut hyp = base.to_vec();
        hyp.push(SizeRule::OuterMonoFilter);
        let via_filter = search_size_counterexample(&hyp, &SizeRule::OuterMonoIdeal, 2).unwrap();
        assert!(matches!(via_filter, SizeSearchOutcome::CounterExample { .. }));
    }

    #[test]
    fn unconstrained_functions_break_containment() {
        let out = search_counterexample(
            &[],
            &Property::Subset,
            &SearchConfig { max_universe: 2, ..SearchConfig::default() },
        )
        .unwrap();
        match out {
            SearchOutcome::CounterExample { function, witness } => {
                let replay = check(&function, &Property::Subset).unwrap();
                assert_eq!(replay.witness.unwrap(), witness);
            }
            SearchOutcome::Exhausted { .. } => panic!("expected a counterexample"),
        }
    }

    #[test]
    fn extensional_pairs_force_cumulativity_on_small_universes() {
        let out = search_counterexample(
            &[Property::Subset, Property::SubSup],
            &Property::Cum,
            &SearchConfig { max_universe: 2, ..SearchConfig::default() },
        )
        .unwrap();
        assert!(matches!(out, SearchOutcome::Exhausted { .. }));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(96))]

        #[test]
        fn relativization_entails_cut((f,) in random_function()) {
            if check_impl(&f, &Property::Pr, Missing::Skip).unwrap().holds {
                prop_assert!(check_impl(&f, &Property::Cut, Missing::Skip).unwrap().holds);
            }
        }

        #[test]
        fn equality_condition_entails_both_halves((f,) in random_function()) {
            if check_impl(&f, &Property::Eq, Missing::Skip).unwrap().holds {
                prop_assert!(check_impl(&f, &Property::Pr, Missing::Skip).unwrap().holds);
                prop_assert!(check_impl(&f, &Property::RatM, Missing::Skip).unwrap().holds);
            }
        }

        #[test]
        fn transitive_staged_condition_is_stronger((f,) in random_function()) {
            for alpha in 0..=1usize {
                if check_cum_alpha(&f, alpha, true).unwrap().holds {
                    prop_assert!(check_cum_alpha(&f, alpha, false).unwrap().holds);
                }
            }
        }

        #[test]
        fn checks_are_deterministic((f,) in random_function()) {
            for p in [Property::Subset, Property::Pr, Property::Cum, Property::Par] {
                prop_assert_eq!(
                    check_impl(&f, &p, Missing::Skip).unwrap(),
                    check_impl(&f, &p, Missing::Skip).unwrap()
                );
            }
        }
    }

    prop_compose! {
        fn random_function()(k in 2usize..4, picks in proptest::collection::vec(
            (0usize..16, 0u8..16), 1..6,
        )) -> (ChoiceFunction,) {
            let universe = canonical_elems(k);
            let subs = subsets(&universe);
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
            (ChoiceFunction::new(universe, mu).unwrap(),)
        }
    }
}
