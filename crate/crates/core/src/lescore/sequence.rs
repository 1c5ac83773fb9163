use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::fgab::{FgAbGroup, GroupHom, IntMatrix};

/// Allowed orders for a node whose group is only partly known.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum OrderSet {
    /// Finite, order otherwise unknown.
    Finite,
    Orders(BTreeSet<BigInt>),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum NodeState {
    Known(FgAbGroup),
    OrderConstrained(OrderSet),
    /// Nonempty; a singleton set is normalized to `Known`.
    Candidates(BTreeSet<FgAbGroup>),
    Unknown,
}

impl NodeState {
    pub fn candidates(set: BTreeSet<FgAbGroup>) -> Result<Self> {
        match set.len() {
            0 => Err(Error::Contract("empty candidate set".into())),
            1 => Ok(NodeState::Known(set.into_iter().next().expect("one element"))),
            _ => Ok(NodeState::Candidates(set)),
        }
    }

    pub fn known(&self) -> Option<&FgAbGroup> {
        match self {
            NodeState::Known(g) => Some(g),
            _ => None,
        }
    }

    pub fn is_known(&self) -> bool {
        matches!(self, NodeState::Known(_))
    }

    /// Whether `g` is consistent with this state.
    pub fn allows(&self, g: &FgAbGroup) -> bool {
        match self {
            NodeState::Known(h) => h == g,
            NodeState::Candidates(s) => s.contains(g),
            NodeState::OrderConstrained(OrderSet::Finite) => g.is_finite(),
            NodeState::OrderConstrained(OrderSet::Orders(o)) => {
                g.order().is_some_and(|n| o.contains(&n))
            }
            NodeState::Unknown => true,
        }
    }

    /// The finite list of possible groups, if the state pins one down.
    pub fn possibilities(&self) -> Option<Vec<&FgAbGroup>> {
        match self {
            NodeState::Known(g) => Some(vec![g]),
            NodeState::Candidates(s) => Some(s.iter().collect()),
            _ => None,
        }
    }

    /// Whether every possible group is finite.
    pub fn surely_finite(&self) -> bool {
        match self {
            NodeState::OrderConstrained(_) => true,
            _ => self
                .possibilities()
                .is_some_and(|v| v.iter().all(|g| g.is_finite())),
        }
    }

    pub fn surely_torsion_free(&self) -> bool {
        self.possibilities()
            .is_some_and(|v| v.iter().all(|g| g.is_torsion_free()))
    }
}

impl fmt::Display for NodeState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeState::Known(g) => write!(f, "{g}"),
            NodeState::Candidates(s) => {
                let items: Vec<String> = s.iter().map(|g| g.to_string()).collect();
                write!(f, "{{{}}}", items.join(" | "))
            }
            NodeState::OrderConstrained(OrderSet::Finite) => write!(f, "finite"),
            NodeState::OrderConstrained(OrderSet::Orders(o)) => {
                let items: Vec<String> = o.iter().map(|n| n.to_string()).collect();
                write!(f, "order {}", items.join("|"))
            }
            NodeState::Unknown => write!(f, "?"),
        }
    }
}

/// Partial knowledge about a map. Also used as a filter for map enumeration.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct EdgeFlags {
    pub injective: Option<bool>,
    pub surjective: Option<bool>,
    pub zero: Option<bool>,
    /// Isomorphism type of the kernel.
    pub kernel: Option<FgAbGroup>,
    /// Isomorphism type of the image.
    pub image: Option<FgAbGroup>,
}

impl EdgeFlags {
    pub fn is_empty(&self) -> bool {
        *self == EdgeFlags::default()
    }

    /// Whether a map has every stated property.
    pub fn admits(&self, f: &GroupHom) -> bool {
        let check = |want: Option<bool>, have: &dyn Fn() -> bool| want.is_none_or(|w| w == have());
        if !check(self.zero, &|| f.is_zero()) {
            return false;
        }
        let kernel = f.kernel().group;
        let image = f.image().group;
        check(self.injective, &|| kernel.is_trivial())
            && check(self.surjective, &|| f.cokernel().0.is_trivial())
            && self.kernel.as_ref().is_none_or(|k| *k == kernel)
            && self.image.as_ref().is_none_or(|i| *i == image)
    }

    /// Exact flags of a known map.
    pub fn of_map(f: &GroupHom) -> Self {
        let kernel = f.kernel().group;
        EdgeFlags {
            injective: Some(kernel.is_trivial()),
            surjective: Some(f.is_surjective()),
            zero: Some(f.is_zero()),
            image: Some(f.image().group),
            kernel: Some(kernel),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum EdgeState {
    KnownMap(GroupHom),
    PropertyConstrained(EdgeFlags),
    Unknown,
}

impl EdgeState {
    pub fn map(&self) -> Option<&GroupHom> {
        match self {
            EdgeState::KnownMap(f) => Some(f),
            _ => None,
        }
    }

    pub fn flags(&self) -> EdgeFlags {
        match self {
            EdgeState::KnownMap(f) => EdgeFlags::of_map(f),
            EdgeState::PropertyConstrained(fl) => fl.clone(),
            EdgeState::Unknown => EdgeFlags::default(),
        }
    }
}

impl fmt::Display for EdgeState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeState::KnownMap(h) => write!(f, "{}", h.matrix()),
            EdgeState::Unknown => write!(f, "?"),
            EdgeState::PropertyConstrained(fl) => {
                let mut parts = Vec::new();
                for (name, v) in [
                    ("zero", fl.zero),
                    ("injective", fl.injective),
                    ("surjective", fl.surjective),
                ] {
                    match v {
                        Some(true) => parts.push(name.to_string()),
                        Some(false) => parts.push(format!("not {name}")),
                        None => {}
                    }
                }
                if let Some(k) = &fl.kernel {
                    parts.push(format!("ker {k}"));
                }
                if let Some(i) = &fl.image {
                    parts.push(format!("im {i}"));
                }
                write!(f, "{}", parts.join(", "))
            }
        }
    }
}

/// Where a node's group comes from in a graded database.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NodeSource {
    pub entry: String,
    pub degree: i64,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Node {
    /// Row label for display.
    pub degree: i64,
    pub label: String,
    pub state: NodeState,
    pub source: Option<NodeSource>,
}

impl Node {
    pub fn new(degree: i64, label: impl Into<String>, state: NodeState) -> Self {
        Node {
            degree,
            label: label.into(),
            state,
            source: None,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Edge {
    pub name: String,
    pub state: EdgeState,
}

impl Edge {
    pub fn new(name: impl Into<String>, state: EdgeState) -> Self {
        Edge {
            name: name.into(),
            state,
        }
    }
}

/// A window of a long exact sequence; edge `i` goes from node `i` to node `i + 1`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ExactSequence {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    /// Column headers of the periodic display.
    pub columns: Vec<String>,
    /// Display column of the first node.
    pub first_column: usize,
    /// The sequence is known to start with `0 -> nodes[0]`.
    pub bounded_start: bool,
    /// The sequence is known to end with `nodes[last] -> 0`.
    pub bounded_end: bool,
}

impl ExactSequence {
    pub fn new(nodes: Vec<Node>, edges: Vec<Edge>) -> Result<Self> {
        let s = ExactSequence {
            nodes,
            edges,
            ..Default::default()
        };
        s.validate()?;
        Ok(s)
    }

    /// A sequence of known groups and maps.
    pub fn from_maps(groups: &[(i64, &str, FgAbGroup)], maps: Vec<GroupHom>) -> Result<Self> {
        let nodes = groups
            .iter()
            .map(|(d, l, g)| Node::new(*d, *l, NodeState::Known(g.clone())))
            .collect();
        let edges = maps
            .into_iter()
            .enumerate()
            .map(|(i, f)| Edge::new(format!("f{i}"), EdgeState::KnownMap(f)))
            .collect();
        Self::new(nodes, edges)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes.is_empty() {
            if self.edges.is_empty() {
                return Ok(());
            }
            return Err(Error::Schema("edges without nodes".into()));
        }
        if self.edges.len() + 1 != self.nodes.len() {
            return Err(Error::Schema(format!(
                "{} nodes need {} edges, found {}",
                self.nodes.len(),
                self.nodes.len() - 1,
                self.edges.len()
            )));
        }
        if !self.columns.is_empty() && self.first_column >= self.columns.len() {
            return Err(Error::Schema(format!(
                "first column {} out of range for {} columns",
                self.first_column,
                self.columns.len()
            )));
        }
        for (i, e) in self.edges.iter().enumerate() {
            if let EdgeState::KnownMap(f) = &e.state {
                for (end, node) in [(f.domain(), &self.nodes[i]), (f.codomain(), &self.nodes[i + 1])] {
                    if node.state.known() != Some(end) {
                        return Err(Error::Schema(format!(
                            "edge {} is a map {} -> {} but its endpoints are {} and {}",
                            e.name,
                            f.domain(),
                            f.codomain(),
                            self.nodes[i].state,
                            self.nodes[i + 1].state
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_fully_known(&self) -> bool {
        self.nodes.iter().all(|n| n.state.is_known())
            && self.edges.iter().all(|e| e.state.map().is_some())
    }

    /// Node index by label.
    pub fn node_index(&self, label: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.label == label)
    }

    pub fn edge_index(&self, name: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.name == name)
    }

    /// Display column of node `i`.
    pub fn column_of(&self, i: usize) -> usize {
        let n = self.columns.len().max(1);
        (self.first_column + i) % n
    }
}

/// Extra knowledge fed to the solver.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SideConstraint {
    /// The node's group embeds into the given group.
    EmbedsInto(usize, FgAbGroup),
    /// The node's group is a quotient of the given group.
    IsQuotientOf(usize, FgAbGroup),
    /// The edge is the map with this matrix.
    MapEquals(usize, IntMatrix),
}

impl SideConstraint {
    pub fn check_refs(&self, seq: &ExactSequence) -> Result<()> {
        let (kind, i, n) = match self {
            SideConstraint::EmbedsInto(i, _) | SideConstraint::IsQuotientOf(i, _) => {
                ("node", *i, seq.nodes.len())
            }
            SideConstraint::MapEquals(i, _) => ("edge", *i, seq.edges.len()),
        };
        if i >= n {
            return Err(Error::Schema(format!("constraint refers to missing {kind} {i}")));
        }
        Ok(())
    }
}
