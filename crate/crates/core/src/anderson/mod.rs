//! Anderson duals of graded groups, of maps, and of whole exact windows.
//!
//! The dual of a graded group `g` in degree `d` sits in
//! `0 -> Ext(g_t, Z) -> I(g)^d -> Hom(g_f, Z) -> 0`, where the torsion degree
//! `t` and free degree `f` depend on the [`Convention`]. It is kept as a pair of
//! blocks rather than collapsed, because the splitting is not canonical.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::fgab::{FgAbGroup, GroupHom, IntMatrix};
use crate::lescore::{Edge, EdgeState, ExactSequence, Node, NodeState};

/// A graded abelian group over a declared degree range. Degrees inside the
/// range may be unknown; degrees outside it are errors.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GradedGroup {
    pub name: String,
    lo: i64,
    hi: i64,
    groups: BTreeMap<i64, Option<FgAbGroup>>,
}

impl GradedGroup {
    pub fn new(name: impl Into<String>, lo: i64, hi: i64) -> Self {
        GradedGroup {
            name: name.into(),
            lo,
            hi,
            groups: BTreeMap::new(),
        }
    }

    /// Builds from consecutive groups starting at degree `lo`.
    pub fn from_groups(name: impl Into<String>, lo: i64, groups: &[FgAbGroup]) -> Self {
        let mut g = GradedGroup::new(name, lo, lo + groups.len() as i64 - 1);
        for (i, x) in groups.iter().enumerate() {
            g.groups.insert(lo + i as i64, Some(x.clone()));
        }
        g
    }

    pub fn range(&self) -> (i64, i64) {
        (self.lo, self.hi)
    }

    fn check(&self, d: i64) -> Result<()> {
        if d < self.lo || d > self.hi {
            return Err(Error::OutOfRange {
                name: self.name.clone(),
                degree: d,
                lo: self.lo,
                hi: self.hi,
            });
        }
        Ok(())
    }

    /// Sets degree `d`; `None` marks it unknown.
    pub fn set(&mut self, d: i64, g: Option<FgAbGroup>) -> Result<()> {
        self.check(d)?;
        self.groups.insert(d, g);
        Ok(())
    }

    /// The group in degree `d`, `None` if it is unknown.
    pub fn get(&self, d: i64) -> Result<Option<&FgAbGroup>> {
        self.check(d)?;
        Ok(self.groups.get(&d).and_then(Option::as_ref))
    }

    /// The group in degree `d`, which must be known.
    pub fn known(&self, d: i64) -> Result<&FgAbGroup> {
        self.get(d)?.ok_or_else(|| {
            Error::Contract(format!("degree {d} of {} is not known", self.name))
        })
    }
}

/// Degree bookkeeping for Anderson duals.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub enum Convention {
    /// Deformation classes of theories in dimension `n` are
    /// `[MT, Σ^{n+1} I_Z]`: torsion from degree `n`, free part from `n + 1`.
    #[default]
    FieldTheory,
    /// Anomalies of `n`-dimensional theories, `Σ^{n+2}`: both degrees shift up by one.
    Anomaly,
}

impl Convention {
    /// Degrees `(torsion, free)` read from the graded group for dual degree `d`.
    pub fn source_degrees(self, d: i64) -> (i64, i64) {
        match self {
            Convention::FieldTheory => (d, d + 1),
            Convention::Anomaly => (d + 1, d + 2),
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Convention::FieldTheory => write!(f, "field-theory"),
            Convention::Anomaly => write!(f, "anomaly"),
        }
    }
}

impl FromStr for Convention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "field-theory" | "fieldtheory" | "ift" | "n+1" => Ok(Convention::FieldTheory),
            "anomaly" | "n+2" => Ok(Convention::Anomaly),
            _ => Err(Error::Unsupported(format!(
                "convention {s:?}; expected field-theory or anomaly"
            ))),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DualizedGroup {
    /// The Pontrjagin dual of the torsion subgroup, identified with it.
    pub torsion: FgAbGroup,
    pub free_rank: usize,
    pub degree: i64,
    pub convention: Convention,
}

impl DualizedGroup {
    /// The abstract group `torsion + Z^free_rank`.
    pub fn group(&self) -> FgAbGroup {
        FgAbGroup::free(self.free_rank).direct_sum(&self.torsion)
    }
}

impl fmt::Display for DualizedGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.group())
    }
}

pub fn anderson_dual_degree(g: &GradedGroup, d: i64, convention: Convention) -> Result<DualizedGroup> {
    let (t, fr) = convention.source_degrees(d);
    let torsion = g.known(t)?.torsion();
    let free_rank = g.known(fr)?.free_rank();
    Ok(DualizedGroup {
        torsion,
        free_rank,
        degree: d,
        convention,
    })
}

/// Blockwise dual of `f: A -> B`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DualMap {
    /// `Hom(f, Z): Z^{rank B} -> Z^{rank A}`, the transpose of the free block.
    pub free_dual: GroupHom,
    /// `Hom(f|tors, Q/Z): Tors B -> Tors A` in the standard character bases.
    pub torsion_dual: GroupHom,
}

/// Dual blocks of `f`. Characters of `Z/d` are identified with `Z/d` by
/// `1 -> (x -> x/d)`, so entry `(i, j)` of the torsion dual is
/// `f_{ji} d^A_i / d^B_j`.
pub fn dualize_map(f: &GroupHom) -> DualMap {
    let (a, b) = (f.domain(), f.codomain());
    let (ra, rb) = (a.free_rank(), b.free_rank());
    let (na, nb) = (a.num_generators(), b.num_generators());
    let m = f.matrix();

    let mut free = IntMatrix::zeros(ra, rb);
    for i in 0..ra {
        for j in 0..rb {
            free[(i, j)] = m[(j, i)].clone();
        }
    }
    let free_dual = GroupHom::new(FgAbGroup::free(rb), FgAbGroup::free(ra), free)
        .expect("free groups have no relations");

    let da = a.generator_orders();
    let db = b.generator_orders();
    let (ta, tb) = (a.torsion(), b.torsion());
    let mut tors = IntMatrix::zeros(na - ra, nb - rb);
    for i in ra..na {
        for j in rb..nb {
            let v = &m[(j, i)] * &da[i];
            debug_assert!((&v % &db[j]).is_zero());
            tors[(i - ra, j - rb)] = v / &db[j];
        }
    }
    let torsion_dual = GroupHom::new(tb, ta, tors).expect("dual of a homomorphism");
    DualMap {
        free_dual,
        torsion_dual,
    }
}

/// The dual window: arrows reversed, nodes replaced by their duals.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DualizedLes {
    pub sequence: ExactSequence,
    /// One entry per output node, in output order.
    pub groups: Vec<DualizedGroup>,
    /// Output edges whose free-to-torsion block was set to zero for lack of data.
    pub mixed_block_warnings: Vec<usize>,
}

/// Dualizes a window whose nodes are all known and carry a source
/// `(entry, degree)` in `graded`. Output node `j` is the dual of input node
/// `n - 1 - j` and keeps its row label; output column labels are reversed.
///
/// A dual map is filled in when the input map is known and, if the dual
/// groups have free parts, the same kind of map one row up (edge `i - 3` in a
/// three-column window) supplies the free block. The free-to-torsion block
/// is not determined by this data and is set to zero with a warning.
pub fn dualize_les(
    seq: &ExactSequence,
    graded: &BTreeMap<String, GradedGroup>,
    convention: Convention,
    rename: &dyn Fn(&str) -> String,
) -> Result<DualizedLes> {
    seq.validate()?;
    let n = seq.nodes.len();
    let mut duals = Vec::with_capacity(n);
    for (i, node) in seq.nodes.iter().enumerate() {
        let NodeState::Known(g) = &node.state else {
            return Err(Error::Contract(format!("node {i} ({}) is not known", node.label)));
        };
        let src = node.source.as_ref().ok_or_else(|| {
            Error::Contract(format!("node {i} ({}) has no source degree", node.label))
        })?;
        let entry = graded.get(&src.entry).ok_or_else(|| {
            Error::Contract(format!("no graded group named {:?}", src.entry))
        })?;
        if entry.known(src.degree)? != g {
            return Err(Error::Contract(format!(
                "node {i} ({}) is {g} but {} in degree {} is {}",
                node.label,
                src.entry,
                src.degree,
                entry.known(src.degree)?
            )));
        }
        duals.push(anderson_dual_degree(entry, src.degree, convention)?);
    }

    let width = seq.columns.len();
    let mut warnings = Vec::new();
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    for j in 0..n.saturating_sub(1) {
        // output edge j: dual of input edge i, from dual(i + 1) to dual(i)
        let i = n - 2 - j;
        let e = &seq.edges[i];
        let upper = (width > 0 && i >= width).then(|| &seq.edges[i - width]);
        let state = dual_edge(e, upper, &duals[i + 1], &duals[i], convention).map_or(EdgeState::Unknown, |(f, mixed)| {
            if mixed {
                warnings.push(j);
            }
            EdgeState::KnownMap(f)
        });
        edges.push(Edge::new(rename(&e.name), state));
    }

    let nodes: Vec<Node> = (0..n)
        .rev()
        .map(|i| {
            let src = seq.nodes[i].source.as_ref().expect("checked above");
            let mut node = Node::new(
                seq.nodes[i].degree,
                format!("I({})^{}", src.entry, duals[i].degree),
                NodeState::Known(duals[i].group()),
            );
            node.source = Some(src.clone());
            node
        })
        .collect();
    let mut out = ExactSequence::new(nodes, edges)?;
    out.columns = seq.columns.iter().rev().map(|c| format!("I({c})")).collect();
    if width > 0 {
        out.first_column = width - 1 - seq.column_of(n - 1);
    }
    out.bounded_start = seq.bounded_end;
    out.bounded_end = seq.bounded_start;
    let groups = duals.into_iter().rev().collect();
    Ok(DualizedLes {
        sequence: out,
        groups,
        mixed_block_warnings: warnings,
    })
}

/// Dual of one edge `A -> B` as a map `dual(B) -> dual(A)`, with a flag for a
/// zeroed mixed block.
fn dual_edge(
    e: &Edge,
    upper: Option<&Edge>,
    db: &DualizedGroup,
    da: &DualizedGroup,
    convention: Convention,
) -> Option<(GroupHom, bool)> {
    // under the anomaly shift both blocks come from other rows; not tracked
    if convention != Convention::FieldTheory {
        return None;
    }
    let tors = dualize_map(e.state.map()?).torsion_dual;
    let free = if db.free_rank == 0 || da.free_rank == 0 {
        GroupHom::zero(FgAbGroup::free(db.free_rank), FgAbGroup::free(da.free_rank))
    } else {
        let g = upper?.state.map()?;
        let d = dualize_map(g).free_dual;
        (d.domain().free_rank() == db.free_rank && d.codomain().free_rank() == da.free_rank).then_some(())?;
        d
    };
    let (src, dst) = (db.group(), da.group());
    let (rs, rd) = (db.free_rank, da.free_rank);
    let mut m = IntMatrix::zeros(dst.num_generators(), src.num_generators());
    for r in 0..rd {
        for c in 0..rs {
            m[(r, c)] = free.matrix()[(r, c)].clone();
        }
    }
    for r in 0..tors.matrix().rows() {
        for c in 0..tors.matrix().cols() {
            m[(rd + r, rs + c)] = tors.matrix()[(r, c)].clone();
        }
    }
    let mixed = rs > 0 && !da.torsion.is_trivial();
    let map = GroupHom::new(src, dst, m).ok()?;
    Some((map, mixed))
}

/// Evaluates the character `chi` (coordinates in the standard character
/// basis of the finite group `g`) at `x`. The value in `Q/Z` is returned as
/// its numerator over the exponent of `g`.
pub fn evaluate_character(g: &FgAbGroup, chi: &[BigInt], x: &[BigInt]) -> BigInt {
    let orders = g.invariant_factors();
    let exp = g.torsion_exponent();
    let mut total = BigInt::zero();
    for (k, d) in orders.iter().enumerate() {
        total += &chi[k] * &x[k] * (&exp / d);
    }
    ((total % &exp) + &exp) % &exp
}
