//! Exactness constraint propagation over partially known windows.
//!
//! The solver keeps, for every edge, a bag of facts (flags, kernel and image
//! types and orders, possibly the map itself) and for every node a
//! [`NodeState`]. Rules only ever narrow knowledge, so iterating them reaches
//! a fixpoint, and re-solving a solved window changes nothing.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use super::maps::{enumerate_maps, enumeration_is_complete, hom_count, map_classes, EnumerateOptions};
use super::sequence::{Edge, EdgeFlags, EdgeState, ExactSequence, Node, NodeState, OrderSet, SideConstraint};
use crate::error::{Error, Result};
use crate::fgab::{embeds, extension_candidates, groups_of_order, homology, is_quotient_of, FgAbGroup, GroupHom};

#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Options for the map enumeration step; `max_maps` bounds the work per edge.
    pub enumerate: EnumerateOptions,
    /// Largest order for which an order constraint is expanded into groups.
    pub expand_order: u64,
    /// Largest candidate set produced by expansion.
    pub max_candidates: usize,
    /// Survivor sets up to this size are split into automorphism classes.
    pub class_limit: usize,
    pub max_rounds: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            enumerate: EnumerateOptions {
                max_maps: 1 << 14,
                ..Default::default()
            },
            expand_order: 1 << 12,
            max_candidates: 256,
            class_limit: 4096,
            max_rounds: 10_000,
        }
    }
}

/// What remains open for one edge after solving.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EdgeAmbiguity {
    pub edge: usize,
    pub name: String,
    pub flags: EdgeFlags,
    /// Maps consistent with everything known, when they were enumerated.
    pub survivors: Option<usize>,
    /// Survivor classes modulo automorphisms of domain and codomain.
    pub classes: Option<usize>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NodeAmbiguity {
    pub node: usize,
    pub label: String,
    pub state: NodeState,
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct SolveReport {
    pub nodes: Vec<NodeAmbiguity>,
    pub edges: Vec<EdgeAmbiguity>,
    /// Enumeration results for edges that were resolved or narrowed by it.
    pub enumerated: Vec<EdgeAmbiguity>,
    pub rounds: usize,
}

impl SolveReport {
    pub fn is_resolved(&self) -> bool {
        self.nodes.is_empty() && self.edges.is_empty()
    }

    pub fn enumeration(&self, edge: usize) -> Option<&EdgeAmbiguity> {
        self.enumerated.iter().find(|e| e.edge == edge)
    }
}

impl fmt::Display for SolveReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_resolved() {
            return writeln!(f, "no ambiguities");
        }
        for n in &self.nodes {
            writeln!(f, "node {} ({}): {}", n.node, n.label, n.state)?;
        }
        for e in &self.edges {
            let state = EdgeState::PropertyConstrained(e.flags.clone());
            write!(f, "edge {} ({}): ", e.edge, e.name)?;
            if e.flags.is_empty() {
                write!(f, "unknown")?;
            } else {
                write!(f, "{state}")?;
            }
            if let Some(s) = e.survivors {
                write!(f, "; {s} candidate maps")?;
            }
            if let Some(c) = e.classes {
                write!(f, " in {c} {}", if c == 1 { "class" } else { "classes" })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default)]
struct EdgeWork {
    map: Option<GroupHom>,
    flags: EdgeFlags,
    /// Orders of kernel and image when known to be finite.
    ker_order: Option<BigInt>,
    im_order: Option<BigInt>,
    survivors: Option<usize>,
    classes: Option<usize>,
    enum_key: Option<String>,
}

struct Work<'a> {
    nodes: Vec<NodeState>,
    labels: Vec<String>,
    edges: Vec<EdgeWork>,
    names: Vec<String>,
    /// Index shift from padded to user coordinates.
    offset: usize,
    opts: &'a SolveOptions,
    changed: bool,
}

/// Flag selector for [`Work::flag`].
#[derive(Clone, Copy, Debug)]
enum Flag {
    Injective,
    Surjective,
    Zero,
}

impl Flag {
    fn get(self, f: &EdgeFlags) -> Option<bool> {
        match self {
            Flag::Injective => f.injective,
            Flag::Surjective => f.surjective,
            Flag::Zero => f.zero,
        }
    }

    fn slot(self, f: &mut EdgeFlags) -> &mut Option<bool> {
        match self {
            Flag::Injective => &mut f.injective,
            Flag::Surjective => &mut f.surjective,
            Flag::Zero => &mut f.zero,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Flag::Injective => "injective",
            Flag::Surjective => "surjective",
            Flag::Zero => "zero",
        }
    }
}

fn order_of(g: &FgAbGroup) -> Option<BigInt> {
    g.order()
}

impl<'a> Work<'a> {
    fn node_window(&self, i: usize) -> String {
        match self.user_node(i) {
            Some(u) => format!("node {u} ({})", self.labels[i]),
            None => "bounded end".to_string(),
        }
    }

    fn edge_window(&self, e: usize) -> String {
        match self.user_edge(e) {
            Some(u) => format!("edge {u} ({})", self.names[e]),
            None => "bounded end".to_string(),
        }
    }

    fn user_node(&self, i: usize) -> Option<usize> {
        let u = i.checked_sub(self.offset)?;
        (u < self.user_len()).then_some(u)
    }

    fn user_edge(&self, e: usize) -> Option<usize> {
        let u = e.checked_sub(self.offset)?;
        (u + 1 < self.user_len()).then_some(u)
    }

    fn user_len(&self) -> usize {
        self.labels.iter().filter(|l| !l.is_empty()).count()
    }

    fn node_contradiction(&self, i: usize, message: String) -> Error {
        Error::Contradiction {
            window: self.node_window(i),
            message,
        }
    }

    fn edge_contradiction(&self, e: usize, message: String) -> Error {
        Error::Contradiction {
            window: self.edge_window(e),
            message,
        }
    }

    // ---- node knowledge ----

    fn known(&self, i: usize) -> Option<&FgAbGroup> {
        self.nodes[i].known()
    }

    fn is_trivial(&self, i: usize) -> bool {
        self.known(i).is_some_and(|g| g.is_trivial())
    }

    /// The order of node `i` if every possibility is finite of one order.
    fn node_order(&self, i: usize) -> Option<BigInt> {
        match &self.nodes[i] {
            NodeState::OrderConstrained(OrderSet::Orders(o)) if o.len() == 1 => o.iter().next().cloned(),
            s => {
                let p = s.possibilities()?;
                let first = order_of(p[0])?;
                p.iter().all(|g| order_of(g).as_ref() == Some(&first)).then_some(first)
            }
        }
    }

    fn set_node_state(&mut self, i: usize, s: NodeState) {
        if self.nodes[i] != s {
            self.nodes[i] = s;
            self.changed = true;
        }
    }

    /// Narrows node `i` to members of `set`.
    fn restrict_node(&mut self, i: usize, set: &BTreeSet<FgAbGroup>, why: &str) -> Result<()> {
        let allowed: BTreeSet<FgAbGroup> = set.iter().filter(|g| self.nodes[i].allows(g)).cloned().collect();
        if allowed.is_empty() {
            return Err(self.node_contradiction(
                i,
                format!("{why} leaves no group consistent with {}", self.nodes[i]),
            ));
        }
        let next = NodeState::candidates(allowed)?;
        self.set_node_state(i, next);
        Ok(())
    }

    /// Filters a node with a finite list of possibilities.
    fn filter_node(&mut self, i: usize, why: &str, keep: impl Fn(&FgAbGroup) -> bool) -> Result<()> {
        let Some(p) = self.nodes[i].possibilities() else {
            return Ok(());
        };
        let kept: BTreeSet<FgAbGroup> = p.into_iter().filter(|g| keep(g)).cloned().collect();
        if kept.is_empty() {
            return Err(self.node_contradiction(i, format!("{why} excludes every possibility of {}", self.nodes[i])));
        }
        let next = NodeState::candidates(kept)?;
        self.set_node_state(i, next);
        Ok(())
    }

    fn require_order(&mut self, i: usize, n: &BigInt) -> Result<()> {
        match self.nodes[i].clone() {
            NodeState::Unknown | NodeState::OrderConstrained(OrderSet::Finite) => {
                self.set_node_state(i, NodeState::OrderConstrained(OrderSet::Orders(BTreeSet::from([n.clone()]))));
                Ok(())
            }
            NodeState::OrderConstrained(OrderSet::Orders(o)) => {
                if !o.contains(n) {
                    return Err(self.node_contradiction(i, format!("order {n} is not among the allowed orders")));
                }
                self.set_node_state(i, NodeState::OrderConstrained(OrderSet::Orders(BTreeSet::from([n.clone()]))));
                Ok(())
            }
            _ => self.filter_node(i, &format!("order {n}"), |g| g.order().as_ref() == Some(n)),
        }
    }

    fn require_finite(&mut self, i: usize) -> Result<()> {
        if let NodeState::Unknown = self.nodes[i] {
            self.set_node_state(i, NodeState::OrderConstrained(OrderSet::Finite));
            return Ok(());
        }
        self.filter_node(i, "finiteness", |g| g.is_finite())
    }

    // ---- edge knowledge ----

    fn flag(&mut self, e: usize, which: Flag, value: bool) -> Result<()> {
        match which.get(&self.edges[e].flags) {
            Some(v) if v == value => Ok(()),
            Some(_) => Err(self.edge_contradiction(
                e,
                format!("edge is required to be both {0} and not {0}", which.name()),
            )),
            None => {
                *which.slot(&mut self.edges[e].flags) = Some(value);
                self.changed = true;
                Ok(())
            }
        }
    }

    fn set_kernel(&mut self, e: usize, g: FgAbGroup) -> Result<()> {
        match &self.edges[e].flags.kernel {
            Some(k) if *k == g => Ok(()),
            Some(k) => Err(self.edge_contradiction(e, format!("kernel would be both {k} and {g}"))),
            None => {
                self.edges[e].flags.kernel = Some(g);
                self.changed = true;
                Ok(())
            }
        }
    }

    fn set_image(&mut self, e: usize, g: FgAbGroup) -> Result<()> {
        match &self.edges[e].flags.image {
            Some(k) if *k == g => Ok(()),
            Some(k) => Err(self.edge_contradiction(e, format!("image would be both {k} and {g}"))),
            None => {
                self.edges[e].flags.image = Some(g);
                self.changed = true;
                Ok(())
            }
        }
    }

    fn set_ker_order(&mut self, e: usize, n: BigInt) -> Result<()> {
        match &self.edges[e].ker_order {
            Some(k) if *k == n => Ok(()),
            Some(k) => Err(self.edge_contradiction(e, format!("kernel order would be both {k} and {n}"))),
            None => {
                self.edges[e].ker_order = Some(n);
                self.changed = true;
                Ok(())
            }
        }
    }

    fn set_im_order(&mut self, e: usize, n: BigInt) -> Result<()> {
        match &self.edges[e].im_order {
            Some(k) if *k == n => Ok(()),
            Some(k) => Err(self.edge_contradiction(e, format!("image order would be both {k} and {n}"))),
            None => {
                self.edges[e].im_order = Some(n);
                self.changed = true;
                Ok(())
            }
        }
    }

    fn set_map(&mut self, e: usize, f: GroupHom) -> Result<()> {
        if let Some(m) = &self.edges[e].map {
            if *m == f {
                return Ok(());
            }
            return Err(self.edge_contradiction(e, format!("map would be both {} and {}", m.matrix(), f.matrix())));
        }
        if !self.edges[e].flags.admits(&f) {
            return Err(self.edge_contradiction(
                e,
                format!(
                    "map {} violates the required properties {}",
                    f.matrix(),
                    EdgeState::PropertyConstrained(self.edges[e].flags.clone())
                ),
            ));
        }
        let of = EdgeFlags::of_map(&f);
        self.edges[e].flags = of;
        self.edges[e].map = Some(f);
        self.changed = true;
        Ok(())
    }

    // ---- rules ----

    fn edge_rules(&mut self, e: usize) -> Result<()> {
        let (a, b) = (e, e + 1);
        if let Some(f) = self.edges[e].map.clone() {
            let of = EdgeFlags::of_map(&f);
            if self.edges[e].flags != of {
                self.edges[e].flags = of;
                self.changed = true;
            }
        }
        let fl = self.edges[e].flags.clone();

        // trivial endpoints
        if self.is_trivial(a) {
            self.flag(e, Flag::Injective, true)?;
            self.flag(e, Flag::Zero, true)?;
        }
        if self.is_trivial(b) {
            self.flag(e, Flag::Surjective, true)?;
            self.flag(e, Flag::Zero, true)?;
        }
        // torsion maps to zero in a torsion-free group
        if self.nodes[a].surely_finite() && self.nodes[b].surely_torsion_free() {
            self.flag(e, Flag::Zero, true)?;
        }

        // flag implications
        if fl.zero == Some(true) {
            self.set_image(e, FgAbGroup::trivial())?;
            if let Some(g) = self.known(a).cloned() {
                self.set_kernel(e, g)?;
            }
        }
        if fl.injective == Some(true) {
            self.set_kernel(e, FgAbGroup::trivial())?;
            if let Some(g) = self.known(a).cloned() {
                self.set_image(e, g)?;
            }
        }
        if fl.surjective == Some(true) {
            if let Some(g) = self.known(b).cloned() {
                self.set_image(e, g)?;
            }
        }
        if fl.zero == Some(true) && fl.injective == Some(true) {
            self.restrict_node(a, &BTreeSet::from([FgAbGroup::trivial()]), "a zero injective map")?;
        }
        if fl.zero == Some(true) && fl.surjective == Some(true) {
            self.restrict_node(b, &BTreeSet::from([FgAbGroup::trivial()]), "a zero surjective map")?;
        }
        if fl.injective == Some(true) && fl.surjective == Some(true) {
            if let Some(g) = self.known(a).cloned() {
                self.restrict_node(b, &BTreeSet::from([g]), "an isomorphism")?;
            } else if let Some(g) = self.known(b).cloned() {
                self.restrict_node(a, &BTreeSet::from([g]), "an isomorphism")?;
            }
        }
        let fl = self.edges[e].flags.clone();
        if let Some(k) = &fl.kernel {
            self.flag(e, Flag::Injective, k.is_trivial())?;
            if let Some(n) = k.order() {
                self.set_ker_order(e, n)?;
            }
            if k.is_finite() {
                let k = k.clone();
                self.filter_node(a, "the kernel", |g| !g.is_finite() || embeds(&k, g).unwrap_or(true))?;
            }
            if self.known(a) == Some(k) && k.is_finite() {
                self.flag(e, Flag::Zero, true)?;
            }
        }
        if let Some(im) = &fl.image {
            self.flag(e, Flag::Zero, im.is_trivial())?;
            if let Some(n) = im.order() {
                self.set_im_order(e, n)?;
            }
            if let Some(bg) = self.known(b) {
                if bg != im {
                    self.flag(e, Flag::Surjective, false)?;
                } else if bg.is_finite() {
                    self.flag(e, Flag::Surjective, true)?;
                }
            }
            if im.is_finite() {
                let im = im.clone();
                self.filter_node(b, "the image", |g| !g.is_finite() || embeds(&im, g).unwrap_or(true))?;
                self.filter_node(a, "the image", |g| !g.is_finite() || is_quotient_of(&im, g).unwrap_or(true))?;
            }
        }
        if fl.injective == Some(true) {
            if let Some(ag) = self.known(a).cloned().filter(|g| g.is_finite()) {
                self.filter_node(b, "an injection", |g| !g.is_finite() || embeds(&ag, g).unwrap_or(true))?;
            }
        }
        if fl.surjective == Some(true) {
            if let Some(bg) = self.known(b).cloned().filter(|g| g.is_finite()) {
                self.filter_node(a, "a surjection", |g| !g.is_finite() || is_quotient_of(&bg, g).unwrap_or(true))?;
            }
        }
        self.order_rules(e)
    }

    /// Order arithmetic `|A| = |ker| * |im|` and `|im| <= |B|`.
    fn order_rules(&mut self, e: usize) -> Result<()> {
        let (a, b) = (e, e + 1);
        let fl = self.edges[e].flags.clone();
        if fl.injective == Some(true) {
            self.set_ker_order(e, BigInt::one())?;
        }
        if fl.zero == Some(true) {
            self.set_im_order(e, BigInt::one())?;
        }
        if self.nodes[a].surely_finite() {
            if let Some(n) = self.node_order(a) {
                if let Some(k) = self.edges[e].ker_order.clone() {
                    if !n.is_multiple_of(&k) {
                        return Err(self.edge_contradiction(e, format!("kernel order {k} does not divide {n}")));
                    }
                    self.set_im_order(e, &n / &k)?;
                }
                if let Some(m) = self.edges[e].im_order.clone() {
                    if !n.is_multiple_of(&m) {
                        return Err(self.edge_contradiction(e, format!("image order {m} does not divide {n}")));
                    }
                    self.set_ker_order(e, &n / &m)?;
                }
            }
        }
        if let (Some(k), Some(m)) = (self.edges[e].ker_order.clone(), self.edges[e].im_order.clone()) {
            self.require_order(a, &(k * m))?;
        }
        if let Some(k) = self.edges[e].ker_order.clone() {
            self.flag(e, Flag::Injective, k.is_one())?;
            if self.edges[e].flags.kernel.is_none() {
                let dom = self.known(a).cloned();
                if let Some(g) = self.unique_of_order(&k, |g| dom.as_ref().is_none_or(|d| !d.is_finite() || embeds(g, d).unwrap_or(true))) {
                    self.set_kernel(e, g)?;
                }
            }
        }
        if let Some(m) = self.edges[e].im_order.clone() {
            self.flag(e, Flag::Zero, m.is_one())?;
            if let Some(nb) = self.nodes[b].surely_finite().then(|| self.node_order(b)).flatten() {
                if !nb.is_multiple_of(&m) {
                    return Err(self.edge_contradiction(e, format!("image order {m} does not divide {nb}")));
                }
                self.flag(e, Flag::Surjective, m == nb)?;
            }
            if self.edges[e].flags.image.is_none() {
                let dom = self.known(a).cloned();
                let cod = self.known(b).cloned();
                let ok = |g: &FgAbGroup| {
                    dom.as_ref().is_none_or(|d| !d.is_finite() || is_quotient_of(g, d).unwrap_or(true))
                        && cod.as_ref().is_none_or(|c| !c.is_finite() || embeds(g, c).unwrap_or(true))
                };
                if let Some(g) = self.unique_of_order(&m, ok) {
                    self.set_image(e, g)?;
                }
            }
        }
        if self.edges[e].im_order.is_some() {
            self.require_finite_image_domain(e)?;
        }
        Ok(())
    }

    /// A finite image inside a torsion-free codomain must be trivial; nothing
    /// else follows about the domain, so this only checks consistency.
    fn require_finite_image_domain(&mut self, e: usize) -> Result<()> {
        let b = e + 1;
        if self.nodes[b].surely_torsion_free() {
            self.flag(e, Flag::Zero, true)?;
        }
        Ok(())
    }

    fn unique_of_order(&self, n: &BigInt, ok: impl Fn(&FgAbGroup) -> bool) -> Option<FgAbGroup> {
        let n = n.to_u64().filter(|&n| n <= self.opts.expand_order)?;
        let mut it = groups_of_order(n).into_iter().filter(|g| ok(g));
        let first = it.next()?;
        it.next().is_none().then_some(first)
    }

    /// Exactness at node `i` between edge `i - 1` and edge `i`.
    fn node_rules(&mut self, i: usize) -> Result<()> {
        let n = self.nodes.len();
        if i > 0 && i + 1 < n {
            let (p, q) = (i - 1, i);
            let pf = self.edges[p].flags.clone();
            let qf = self.edges[q].flags.clone();
            if let Some(z) = pf.zero {
                self.flag(q, Flag::Injective, z)?;
            }
            if let Some(inj) = qf.injective {
                self.flag(p, Flag::Zero, inj)?;
            }
            if let Some(s) = pf.surjective {
                self.flag(q, Flag::Zero, s)?;
            }
            if let Some(z) = qf.zero {
                self.flag(p, Flag::Surjective, z)?;
            }
            if let Some(im) = pf.image {
                self.set_kernel(q, im)?;
            }
            if let Some(k) = qf.kernel {
                self.set_image(p, k)?;
            }
            if let Some(m) = self.edges[p].im_order.clone() {
                self.set_ker_order(q, m)?;
            }
            if let Some(k) = self.edges[q].ker_order.clone() {
                self.set_im_order(p, k)?;
            }
            if let Some(f) = self.edges[p].map.clone() {
                self.set_image(q, f.cokernel().0)?;
            }
        }
        if i + 1 < n {
            // node sits in 0 -> ker -> node -> im -> 0
            let qf = self.edges[i].flags.clone();
            if let (Some(k), Some(im)) = (&qf.kernel, &qf.image) {
                if let Ok(set) = extension_candidates(k, im) {
                    self.restrict_node(i, &set, "the extension of image by kernel")?;
                }
            }
        }
        if i > 0 {
            // a finite image in a node whose cokernel is known finite
            let pf = self.edges[i - 1].flags.clone();
            if pf.surjective == Some(true) && self.nodes[i - 1].surely_finite() {
                self.require_finite(i)?;
            }
        }
        Ok(())
    }

    fn expand_orders(&mut self, i: usize) -> Result<()> {
        let NodeState::OrderConstrained(OrderSet::Orders(o)) = self.nodes[i].clone() else {
            return Ok(());
        };
        let mut set = BTreeSet::new();
        for n in &o {
            let Some(n) = n.to_u64().filter(|&n| n <= self.opts.expand_order) else {
                return Ok(());
            };
            set.extend(groups_of_order(n));
            if set.len() > self.opts.max_candidates {
                return Ok(());
            }
        }
        if set.is_empty() {
            return Err(self.node_contradiction(i, "no group has the allowed orders".into()));
        }
        self.restrict_node(i, &set, "order")
    }

    fn constraint_rules(&mut self, c: &SideConstraint) -> Result<()> {
        match c {
            SideConstraint::EmbedsInto(u, h) => {
                let i = u + self.offset;
                if self.nodes[i].possibilities().is_some() {
                    let h2 = h.clone();
                    self.filter_node(i, &format!("embedding into {h}"), |g| embeds(g, &h2).unwrap_or(true))?;
                } else if let Some(set) = self.subgroup_types(h) {
                    self.restrict_node(i, &set, &format!("embedding into {h}"))?;
                }
            }
            SideConstraint::IsQuotientOf(u, h) => {
                let i = u + self.offset;
                if self.nodes[i].possibilities().is_some() {
                    let h2 = h.clone();
                    self.filter_node(i, &format!("being a quotient of {h}"), |g| is_quotient_of(g, &h2).unwrap_or(true))?;
                } else if let Some(set) = self.subgroup_types(h) {
                    // subgroups and quotients of a finite group have the same types
                    self.restrict_node(i, &set, &format!("being a quotient of {h}"))?;
                }
            }
            SideConstraint::MapEquals(u, m) => {
                let e = u + self.offset;
                if let (Some(a), Some(b)) = (self.known(e).cloned(), self.known(e + 1).cloned()) {
                    let f = GroupHom::new(a, b, m.clone()).map_err(|err| {
                        self.edge_contradiction(e, format!("stated matrix is not a homomorphism: {err}"))
                    })?;
                    self.set_map(e, f)?;
                }
            }
        }
        Ok(())
    }

    /// Isomorphism types of subgroups of a small finite group.
    fn subgroup_types(&self, h: &FgAbGroup) -> Option<BTreeSet<FgAbGroup>> {
        let n = h.order_u64().filter(|&n| n <= self.opts.expand_order)?;
        let mut set = BTreeSet::new();
        for d in 1..=n {
            if n % d == 0 {
                set.extend(groups_of_order(d).into_iter().filter(|g| embeds(g, h).unwrap_or(false)));
            }
        }
        Some(set)
    }

    fn promote_zero(&mut self, e: usize) -> Result<()> {
        if self.edges[e].map.is_none() && self.edges[e].flags.zero == Some(true) {
            if let (Some(a), Some(b)) = (self.known(e).cloned(), self.known(e + 1).cloned()) {
                self.set_map(e, GroupHom::zero(a, b))?;
            }
        }
        Ok(())
    }

    fn cheap_pass(&mut self, constraints: &[SideConstraint]) -> Result<()> {
        for e in 0..self.edges.len() {
            self.edge_rules(e)?;
        }
        for i in 0..self.nodes.len() {
            self.node_rules(i)?;
            self.expand_orders(i)?;
        }
        for c in constraints {
            self.constraint_rules(c)?;
        }
        for e in 0..self.edges.len() {
            self.promote_zero(e)?;
        }
        Ok(())
    }

    /// Enumerates maps for edges between known groups and keeps those
    /// consistent with the flags and with exactness against known neighbours.
    fn enumerate_edge(&mut self, e: usize) -> Result<()> {
        if self.edges[e].map.is_some() {
            return Ok(());
        }
        let (Some(a), Some(b)) = (self.known(e).cloned(), self.known(e + 1).cloned()) else {
            return Ok(());
        };
        if !enumeration_is_complete(&a, &b) {
            return Ok(());
        }
        match hom_count(&a, &b, self.opts.enumerate.window) {
            Ok(n) if n <= self.opts.enumerate.max_maps => {}
            _ => return Ok(()),
        }
        let prev = e.checked_sub(1).and_then(|p| self.edges[p].map.clone());
        let next = self.edges.get(e + 1).and_then(|q| q.map.clone());
        let key = format!("{:?}|{:?}|{:?}", self.edges[e].flags, prev, next);
        if self.edges[e].enum_key.as_deref() == Some(key.as_str()) {
            return Ok(());
        }
        self.edges[e].enum_key = Some(key);

        let opts = EnumerateOptions {
            dedup_codomain: false,
            ..self.opts.enumerate.clone()
        };
        let candidates = enumerate_maps(&a, &b, &self.edges[e].flags, &opts)?;
        let survivors: Vec<GroupHom> = candidates
            .into_iter()
            .filter(|f| prev.as_ref().is_none_or(|p| exact_at(p, f)) && next.as_ref().is_none_or(|q| exact_at(f, q)))
            .collect();
        match survivors.len() {
            0 => Err(self.edge_contradiction(e, format!("no map {a} -> {b} is consistent with exactness"))),
            1 => {
                self.edges[e].survivors = Some(1);
                self.edges[e].classes = Some(1);
                let f = survivors.into_iter().next().expect("one survivor");
                self.set_map(e, f)
            }
            n => {
                let classes = (n <= self.opts.class_limit).then(|| map_classes(&survivors).len());
                if self.edges[e].survivors != Some(n) || self.edges[e].classes != classes {
                    self.edges[e].survivors = Some(n);
                    self.edges[e].classes = classes;
                }
                let all: Vec<EdgeFlags> = survivors.iter().map(EdgeFlags::of_map).collect();
                let first = all[0].clone();
                for flag in [Flag::Injective, Flag::Surjective, Flag::Zero] {
                    let v = flag.get(&first);
                    if all.iter().all(|f| flag.get(f) == v) {
                        if let Some(v) = v {
                            self.flag(e, flag, v)?;
                        }
                    }
                }
                if all.iter().all(|f| f.kernel == first.kernel) {
                    if let Some(k) = first.kernel.clone() {
                        self.set_kernel(e, k)?;
                    }
                }
                if all.iter().all(|f| f.image == first.image) {
                    if let Some(i) = first.image.clone() {
                        self.set_image(e, i)?;
                    }
                }
                Ok(())
            }
        }
    }
}

/// `im f = ker g` with `g . f = 0`.
fn exact_at(f: &GroupHom, g: &GroupHom) -> bool {
    match g.compose(f) {
        Ok(gf) if gf.is_zero() => homology(f, g).is_ok_and(|h| h.is_trivial()),
        _ => false,
    }
}

/// Solves with default options.
pub fn solve(seq: &ExactSequence, constraints: &[SideConstraint]) -> Result<(ExactSequence, SolveReport)> {
    solve_with(seq, constraints, &SolveOptions::default())
}

/// Propagates exactness through `seq` until nothing changes. Returns the
/// narrowed window and the list of what is still ambiguous; a window with no
/// consistent assignment is reported as a contradiction.
pub fn solve_with(
    seq: &ExactSequence,
    constraints: &[SideConstraint],
    opts: &SolveOptions,
) -> Result<(ExactSequence, SolveReport)> {
    seq.validate()?;
    for c in constraints {
        c.check_refs(seq)?;
    }
    if seq.is_empty() {
        return Ok((seq.clone(), SolveReport::default()));
    }

    let offset = usize::from(seq.bounded_start);
    let mut nodes = Vec::new();
    let mut labels = Vec::new();
    let mut edges = Vec::new();
    let mut names = Vec::new();
    if seq.bounded_start {
        nodes.push(NodeState::Known(FgAbGroup::trivial()));
        labels.push(String::new());
        edges.push(EdgeWork::default());
        names.push(String::new());
    }
    for (i, n) in seq.nodes.iter().enumerate() {
        nodes.push(n.state.clone());
        // an empty label marks padding, so user labels are made nonempty
        labels.push(if n.label.is_empty() { format!("#{i}") } else { n.label.clone() });
        if let Some(e) = seq.edges.get(i) {
            let mut w = EdgeWork::default();
            match &e.state {
                EdgeState::KnownMap(f) => w.map = Some(f.clone()),
                EdgeState::PropertyConstrained(fl) => w.flags = fl.clone(),
                EdgeState::Unknown => {}
            }
            edges.push(w);
            names.push(e.name.clone());
        }
    }
    if seq.bounded_end {
        edges.push(EdgeWork::default());
        names.push(String::new());
        nodes.push(NodeState::Known(FgAbGroup::trivial()));
        labels.push(String::new());
    }

    let mut w = Work {
        nodes,
        labels,
        edges,
        names,
        offset,
        opts,
        changed: true,
    };
    let mut rounds = 0;
    loop {
        while w.changed {
            w.changed = false;
            rounds += 1;
            if rounds > opts.max_rounds {
                return Err(Error::Unsupported(format!("solver did not settle within {} rounds", opts.max_rounds)));
            }
            w.cheap_pass(constraints)?;
        }
        for e in 0..w.edges.len() {
            w.enumerate_edge(e)?;
        }
        if !w.changed {
            break;
        }
    }

    let mut out = seq.clone();
    let mut report = SolveReport {
        rounds,
        ..Default::default()
    };
    for (u, node) in out.nodes.iter_mut().enumerate() {
        let i = u + offset;
        node.state = w.nodes[i].clone();
        if !node.state.is_known() {
            report.nodes.push(NodeAmbiguity {
                node: u,
                label: node.label.clone(),
                state: node.state.clone(),
            });
        }
    }
    for (u, edge) in out.edges.iter_mut().enumerate() {
        let ew = &w.edges[u + offset];
        let amb = EdgeAmbiguity {
            edge: u,
            name: edge.name.clone(),
            flags: ew.flags.clone(),
            survivors: ew.survivors,
            classes: ew.classes,
        };
        if ew.survivors.is_some() {
            report.enumerated.push(amb.clone());
        }
        edge.state = match &ew.map {
            Some(f) => EdgeState::KnownMap(f.clone()),
            None => {
                report.edges.push(amb);
                if ew.flags.is_empty() {
                    EdgeState::Unknown
                } else {
                    EdgeState::PropertyConstrained(ew.flags.clone())
                }
            }
        };
    }
    Ok((out, report))
}

/// Convenience for tests and recipes: a node list and edge list with all
/// edges unknown.
pub fn window(groups: &[(i64, &str, NodeState)]) -> ExactSequence {
    let nodes: Vec<Node> = groups.iter().map(|(d, l, s)| Node::new(*d, *l, s.clone())).collect();
    let edges = (1..nodes.len()).map(|i| Edge::new(format!("f{}", i - 1), EdgeState::Unknown)).collect();
    ExactSequence {
        nodes,
        edges,
        ..Default::default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lescore::check_exact;

    fn g(s: &str) -> FgAbGroup {
        s.parse().unwrap()
    }

    fn k(s: &str) -> NodeState {
        NodeState::Known(g(s))
    }

    #[test]
    fn zero_window_forces_middle() {
        let seq = window(&[(0, "a", k("0")), (0, "b", k("0")), (0, "x", NodeState::Unknown), (0, "c", k("0")), (0, "d", k("0"))]);
        let (out, rep) = solve(&seq, &[]).unwrap();
        assert_eq!(out.nodes[2].state, k("0"));
        assert!(rep.is_resolved());
        assert!(check_exact(&out).unwrap().is_exact());
    }

    #[test]
    fn short_exact_with_unknown_middle() {
        let mut seq = window(&[(0, "a", k("Z/2")), (0, "x", NodeState::Unknown), (0, "b", k("Z/2"))]);
        seq.bounded_start = true;
        seq.bounded_end = true;
        let (out, rep) = solve(&seq, &[]).unwrap();
        let want: BTreeSet<FgAbGroup> = [g("Z/4"), g("Z/2+Z/2")].into();
        assert_eq!(out.nodes[1].state, NodeState::Candidates(want));
        assert_eq!(rep.nodes.len(), 1);
        let (out2, _) = solve(&seq, &[SideConstraint::EmbedsInto(1, g("Z/8"))]).unwrap();
        assert_eq!(out2.nodes[1].state, k("Z/4"));
    }

    #[test]
    fn contradiction_is_reported() {
        let mut seq = window(&[(0, "a", k("Z/2")), (0, "b", k("Z/3"))]);
        seq.bounded_start = true;
        seq.bounded_end = true;
        match solve(&seq, &[]) {
            Err(Error::Contradiction { window, .. }) => assert!(window.contains("edge 0") || window.contains("node")),
            other => panic!("expected contradiction, got {other:?}"),
        }
    }

    #[test]
    fn unique_surjection_is_found() {
        let mut seq = window(&[(0, "a", k("Z/8")), (0, "b", k("Z/2"))]);
        seq.bounded_end = true;
        let (out, rep) = solve(&seq, &[]).unwrap();
        let f = out.edges[0].state.map().expect("resolved");
        assert!(f.is_surjective());
        assert!(rep.is_resolved());
    }

    #[test]
    fn ambiguous_maps_are_counted() {
        // Z/4 -> Z/4 surjective: two automorphisms, one class
        let mut seq = window(&[(0, "a", k("Z/4")), (0, "b", k("Z/4"))]);
        seq.bounded_end = true;
        let (_, rep) = solve(&seq, &[]).unwrap();
        assert_eq!(rep.edges.len(), 1);
        assert_eq!(rep.edges[0].survivors, Some(2));
        assert_eq!(rep.edges[0].classes, Some(1));
        assert_eq!(rep.edges[0].flags.injective, Some(true));
    }

    #[test]
    fn idempotent() {
        let mut seq = window(&[
            (2, "a", k("Z/2")),
            (2, "b", k("Z/2")),
            (2, "x", NodeState::Unknown),
            (1, "c", k("Z/2")),
            (1, "d", k("Z/2")),
        ]);
        seq.edges[0].state = EdgeState::PropertyConstrained(EdgeFlags {
            zero: Some(true),
            ..Default::default()
        });
        seq.edges[3].state = EdgeState::PropertyConstrained(EdgeFlags {
            zero: Some(true),
            ..Default::default()
        });
        let (once, _) = solve(&seq, &[]).unwrap();
        let (twice, _) = solve(&once, &[]).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn order_arithmetic() {
        // 0 -> Z/3 -> ? -> Z/5 -> 0 has order 15
        let mut seq = window(&[(0, "a", k("Z/3")), (0, "x", NodeState::Unknown), (0, "b", k("Z/5"))]);
        seq.bounded_start = true;
        seq.bounded_end = true;
        let (out, _) = solve(&seq, &[]).unwrap();
        assert_eq!(out.nodes[1].state, k("Z/15"));
    }
}
