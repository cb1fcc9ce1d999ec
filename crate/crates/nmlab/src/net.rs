//! Inheritance-diagram data model and path enumeration.
//!
//! A diagram is a finite DAG whose arrows carry a polarity.  Paths are
//! uninterrupted chains of arrows; a chain may end in a negative arrow but
//! cannot be extended past one.  The `degree` measure (maximal length of a
//! parallel chain) is the well-founded measure driving the validity
//! induction in [`crate::infer`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// Name of a diagram node.  Nonempty, case-sensitive.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(name: impl Into<String>) -> Self {
        let name = name.into();
        assert!(!name.is_empty(), "node names must be nonempty");
        NodeId(name)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId::new(s)
    }
}

/// Sign of an arrow: `a -> b` or `a !> b`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn flip(self) -> Self {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        }
    }
}

/// A signed arrow between two distinct nodes.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Arrow {
    pub source: NodeId,
    pub target: NodeId,
    pub polarity: Polarity,
}

impl Arrow {
    pub fn positive(source: impl Into<NodeId>, target: impl Into<NodeId>) -> Self {
        Arrow {
            source: source.into(),
            target: target.into(),
            polarity: Polarity::Positive,
        }
    }

    pub fn negative(source: impl Into<NodeId>, target: impl Into<NodeId>) -> Self {
        Arrow {
            source: source.into(),
            target: target.into(),
            polarity: Polarity::Negative,
        }
    }
}

impl From<&str> for Arrow {
    /// Parses a single `"a -> b"` / `"a !> b"` item; convenient in tests.
    fn from(s: &str) -> Self {
        if let Some((l, r)) = s.split_once("->") {
            Arrow::positive(l.trim(), r.trim())
        } else if let Some((l, r)) = s.split_once("!>") {
            Arrow::negative(l.trim(), r.trim())
        } else {
            panic!("not an arrow: {s:?}")
        }
    }
}

impl fmt::Display for Arrow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.polarity {
            Polarity::Positive => "->",
            Polarity::Negative => "!>",
        };
        write!(f, "{} {} {}", self.source, op, self.target)
    }
}

impl fmt::Debug for Arrow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum NetError {
    #[error("cycle through nodes: {}", .0.iter().map(|n| n.as_str()).collect::<Vec<_>>().join(" -> "))]
    CycleError(Vec<NodeId>),
    #[error("hard contradiction: both {0} -> {1} and {0} !> {1}")]
    HardContradiction(NodeId, NodeId),
    #[error("arrow endpoint {0} is not a declared node")]
    DanglingNode(NodeId),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("self-loop on {0}")]
    SelfLoop(NodeId),
    #[error("duplicate node declaration {0}")]
    DuplicateNode(NodeId),
}

/// A finite acyclic inheritance diagram without hard contradictions.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Diagram {
    nodes: BTreeSet<NodeId>,
    arrows: BTreeSet<Arrow>,
}

impl Diagram {
    /// Validates the raw node/arrow listing.  Nodes mentioned only by arrows
    /// are an error when `declared` is given explicitly (use
    /// [`Diagram::from_arrows`] to infer the node set).
    pub fn new<I, J>(declared: I, arrows: J) -> Result<Self, NetError>
    where
        I: IntoIterator<Item = NodeId>,
        J: IntoIterator<Item = Arrow>,
    {
        let mut nodes = BTreeSet::new();
        for n in declared {
            if !nodes.insert(n.clone()) {
                return Err(NetError::DuplicateNode(n));
            }
        }
        let arrows: BTreeSet<Arrow> = arrows.into_iter().collect();
        for a in &arrows {
            if a.source == a.target {
                return Err(NetError::SelfLoop(a.source.clone()));
            }
            for end in [&a.source, &a.target] {
                if !nodes.contains(end) {
                    return Err(NetError::DanglingNode(end.clone()));
                }
            }
            let twin = Arrow {
                polarity: a.polarity.flip(),
                ..a.clone()
            };
            if arrows.contains(&twin) {
                return Err(NetError::HardContradiction(
                    a.source.clone(),
                    a.target.clone(),
                ));
            }
        }
        let d = Diagram { nodes, arrows };
        if let Some(cycle) = d.find_cycle() {
            return Err(NetError::CycleError(cycle));
        }
        Ok(d)
    }

    /// Builds a diagram whose node set is exactly the arrow endpoints.
    pub fn from_arrows<J>(arrows: J) -> Result<Self, NetError>
    where
        J: IntoIterator<Item = Arrow>,
    {
        let arrows: Vec<Arrow> = arrows.into_iter().collect();
        let nodes: BTreeSet<NodeId> = arrows
            .iter()
            .flat_map(|a| [a.source.clone(), a.target.clone()])
            .collect();
        Diagram::new(nodes, arrows)
    }

    /// Test helper: builds from `"a -> b"` / `"a !> b"` items, panicking on
    /// invalid input.
    pub fn parse_arrows(items: &[&str]) -> Self {
        Diagram::from_arrows(items.iter().map(|s| Arrow::from(*s))).unwrap()
    }

    pub fn nodes(&self) -> impl Iterator<Item = &NodeId> {
        self.nodes.iter()
    }

    pub fn arrows(&self) -> impl Iterator<Item = &Arrow> {
        self.arrows.iter()
    }

    pub fn has_node(&self, n: &NodeId) -> bool {
        self.nodes.contains(n)
    }

    pub fn has_arrow(&self, source: &NodeId, target: &NodeId, polarity: Polarity) -> bool {
        self.arrows.contains(&Arrow {
            source: source.clone(),
            target: target.clone(),
            polarity,
        })
    }

    /// Arrows leaving `n`, in canonical order.
    pub fn out_arrows<'a>(&'a self, n: &'a NodeId) -> impl Iterator<Item = &'a Arrow> {
        self.arrows.iter().filter(move |a| &a.source == n)
    }

    /// Arrows entering `n`, in canonical order.
    pub fn in_arrows<'a>(&'a self, n: &'a NodeId) -> impl Iterator<Item = &'a Arrow> {
        self.arrows.iter().filter(move |a| &a.target == n)
    }

    fn find_cycle(&self) -> Option<Vec<NodeId>> {
        // Iterative DFS with colouring; returns the first cycle found.
        #[derive(Clone, Copy, PartialEq)]
        enum Colour {
            White,
            Grey,
            Black,
        }
        let mut colour: BTreeMap<&NodeId, Colour> =
            self.nodes.iter().map(|n| (n, Colour::White)).collect();
        let mut stack: Vec<&NodeId> = Vec::new();

        fn visit<'a>(
            d: &'a Diagram,
            n: &'a NodeId,
            colour: &mut BTreeMap<&'a NodeId, Colour>,
            stack: &mut Vec<&'a NodeId>,
        ) -> Option<Vec<NodeId>> {
            colour.insert(n, Colour::Grey);
            stack.push(n);
            for a in d.out_arrows(n) {
                match colour[&a.target] {
                    Colour::Grey => {
                        let pos = stack.iter().position(|m| **m == a.target).unwrap();
                        let mut cycle: Vec<NodeId> =
                            stack[pos..].iter().map(|m| (*m).clone()).collect();
                        cycle.push(a.target.clone());
                        return Some(cycle);
                    }
                    Colour::White => {
                        if let Some(c) = visit(d, &a.target, colour, stack) {
                            return Some(c);
                        }
                    }
                    Colour::Black => {}
                }
            }
            stack.pop();
            colour.insert(n, Colour::Black);
            None
        }

        for n in &self.nodes {
            if colour[n] == Colour::White {
                if let Some(c) = visit(self, n, &mut colour, &mut stack) {
                    return Some(c);
                }
            }
        }
        None
    }

    /// Nodes in a topological order (sources first).  Deterministic.
    pub fn topological_order(&self) -> Vec<NodeId> {
        let mut indeg: BTreeMap<&NodeId, usize> = self.nodes.iter().map(|n| (n, 0)).collect();
        for a in &self.arrows {
            *indeg.get_mut(&a.target).unwrap() += 1;
        }
        let mut order = Vec::with_capacity(self.nodes.len());
        let mut ready: BTreeSet<&NodeId> = indeg
            .iter()
            .filter(|(_, d)| **d == 0)
            .map(|(n, _)| *n)
            .collect();
        while let Some(n) = ready.pop_first() {
            order.push(n.clone());
            for a in self.out_arrows(n) {
                let d = indeg.get_mut(&a.target).unwrap();
                *d -= 1;
                if *d == 0 {
                    ready.insert(&a.target);
                }
            }
        }
        debug_assert_eq!(order.len(), self.nodes.len());
        order
    }

    fn check_node(&self, n: &NodeId) -> Result<(), NetError> {
        if self.has_node(n) {
            Ok(())
        } else {
            Err(NetError::UnknownNode(n.clone()))
        }
    }

    /// All chains from `x` to `y`.  A chain extends arrow by arrow and stops
    /// at the first negative arrow, so every chain carries at most one
    /// negative sign, in last position.
    pub fn generalized_paths(&self, x: &NodeId, y: &NodeId) -> Result<BTreeSet<Path>, NetError> {
        self.check_node(x)?;
        self.check_node(y)?;
        let mut out = BTreeSet::new();
        let mut prefix: Vec<Arrow> = Vec::new();
        self.chains_from(x, y, &mut prefix, &mut out);
        Ok(out)
    }

    fn chains_from(&self, at: &NodeId, y: &NodeId, prefix: &mut Vec<Arrow>, out: &mut BTreeSet<Path>) {
        for a in self.out_arrows(at) {
            prefix.push(a.clone());
            if &a.target == y {
                out.insert(Path::new(prefix[0].source.clone(), prefix.clone()).unwrap());
            }
            if a.polarity == Polarity::Positive {
                self.chains_from(&a.target.clone(), y, prefix, out);
            }
            prefix.pop();
        }
    }

    /// The potential paths from `x` to `y`: chains with at most one negative
    /// arrow, in last position.  With the chain construction above this is
    /// every chain, so the two enumerations agree extensionally.
    pub fn potential_paths(&self, x: &NodeId, y: &NodeId) -> Result<BTreeSet<Path>, NetError> {
        Ok(self
            .generalized_paths(x, y)?
            .into_iter()
            .filter(|p| p.kind() != PathKind::Generalized)
            .collect())
    }

    /// Maximal arrow count over all chains from `x` to the endpoint of `σ`.
    pub fn degree(&self, x: &NodeId, sigma: &Path) -> Result<usize, NetError> {
        self.check_node(x)?;
        let y = sigma.endpoint();
        self.check_node(y)?;
        let parallel = self.generalized_paths(x, y)?;
        Ok(parallel.iter().map(|p| p.len()).max().unwrap_or(0))
    }
}

/// Kind of a path value, determined by its arrow signs.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PathKind {
    /// More than one negative arrow, or a negative arrow before the end.
    Generalized,
    /// No negative arrow.
    PotentialPositive,
    /// Exactly one negative arrow, in last position.
    PotentialNegative,
}

/// A nonempty chain of arrows with a fixed origin.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path {
    origin: NodeId,
    arrows: Vec<Arrow>,
}

impl Path {
    /// Checks the chaining invariant: nonempty, consecutive arrows join.
    pub fn new(origin: NodeId, arrows: Vec<Arrow>) -> Result<Self, NetError> {
        assert!(!arrows.is_empty(), "paths have at least one arrow");
        let mut at = &origin;
        for a in &arrows {
            if &a.source != at {
                return Err(NetError::DanglingNode(a.source.clone()));
            }
            at = &a.target;
        }
        Ok(Path { origin, arrows })
    }

    pub fn direct(a: Arrow) -> Self {
        Path {
            origin: a.source.clone(),
            arrows: vec![a],
        }
    }

    pub fn origin(&self) -> &NodeId {
        &self.origin
    }

    pub fn endpoint(&self) -> &NodeId {
        &self.arrows.last().unwrap().target
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn first(&self) -> &Arrow {
        &self.arrows[0]
    }

    pub fn last(&self) -> &Arrow {
        self.arrows.last().unwrap()
    }

    /// Sign of the path as a whole: the sign of its last arrow.
    pub fn polarity(&self) -> Polarity {
        self.last().polarity
    }

    pub fn kind(&self) -> PathKind {
        let negatives = self
            .arrows
            .iter()
            .filter(|a| a.polarity == Polarity::Negative)
            .count();
        match negatives {
            0 => PathKind::PotentialPositive,
            1 if self.last().polarity == Polarity::Negative => PathKind::PotentialNegative,
            _ => PathKind::Generalized,
        }
    }

    /// The path without its last arrow, or `None` for a direct link.
    pub fn prefix(&self) -> Option<Path> {
        if self.arrows.len() == 1 {
            None
        } else {
            Some(Path {
                origin: self.origin.clone(),
                arrows: self.arrows[..self.arrows.len() - 1].to_vec(),
            })
        }
    }

    /// Every strict nonempty prefix, shortest first.
    pub fn strict_prefixes(&self) -> impl Iterator<Item = Path> + '_ {
        (1..self.arrows.len()).map(|k| Path {
            origin: self.origin.clone(),
            arrows: self.arrows[..k].to_vec(),
        })
    }

    /// Appends an arrow; the result must still chain.
    pub fn extend(&self, a: Arrow) -> Result<Path, NetError> {
        let mut arrows = self.arrows.clone();
        arrows.push(a);
        Path::new(self.origin.clone(), arrows)
    }

    /// Concatenation with a path starting at this endpoint.
    pub fn concat(&self, tau: &Path) -> Result<Path, NetError> {
        let mut arrows = self.arrows.clone();
        arrows.extend(tau.arrows.iter().cloned());
        Path::new(self.origin.clone(), arrows)
    }

    /// The nodes along the path, origin first.
    pub fn nodes(&self) -> impl Iterator<Item = &NodeId> {
        std::iter::once(&self.origin).chain(self.arrows.iter().map(|a| &a.target))
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.origin)?;
        for a in &self.arrows {
            let op = match a.polarity {
                Polarity::Positive => "->",
                Polarity::Negative => "!>",
            };
            write!(f, " {op} {}", a.target)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
