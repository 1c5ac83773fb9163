use std::fmt;

use num_bigint::BigInt;

use super::sequence::ExactSequence;
use crate::error::{Error, Result};
use crate::fgab::{homology, FgAbGroup, GroupHom, Lattice, Subquotient};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Verdict {
    Exact,
    /// The composite through this node is nonzero; the witness lies in the
    /// image of the incoming map but maps nontrivially.
    NotComplex { witness: Vec<BigInt> },
    /// `ker / im` is nontrivial; witnesses are kernel elements generating it.
    Homology {
        image: FgAbGroup,
        kernel: FgAbGroup,
        homology: FgAbGroup,
        witnesses: Vec<Vec<BigInt>>,
    },
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PositionVerdict {
    pub node: usize,
    pub label: String,
    pub verdict: Verdict,
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ExactnessReport {
    pub positions: Vec<PositionVerdict>,
}

impl ExactnessReport {
    pub fn is_exact(&self) -> bool {
        self.positions.iter().all(|p| p.verdict == Verdict::Exact)
    }

    pub fn failures(&self) -> impl Iterator<Item = &PositionVerdict> {
        self.positions.iter().filter(|p| p.verdict != Verdict::Exact)
    }
}

fn fmt_vec(v: &[BigInt]) -> String {
    let items: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", items.join(", "))
}

impl fmt::Display for PositionVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "node {} ({}): ", self.node, self.label)?;
        match &self.verdict {
            Verdict::Exact => write!(f, "exact"),
            Verdict::NotComplex { witness } => {
                write!(f, "not a complex; image element {} maps nontrivially", fmt_vec(witness))
            }
            Verdict::Homology {
                image,
                kernel,
                homology,
                witnesses,
            } => {
                let w: Vec<String> = witnesses.iter().map(|v| fmt_vec(v)).collect();
                write!(
                    f,
                    "image {image} but kernel {kernel}; homology {homology} generated by {}",
                    w.join(", ")
                )
            }
        }
    }
}

/// Compares `im f` with `ker g` at the node between them.
fn verdict(f: &GroupHom, g: &GroupHom) -> Verdict {
    let gf = g.compose(f).expect("composable by construction");
    if !gf.is_zero() {
        let j = (0..gf.matrix().cols())
            .find(|&j| !gf.codomain().is_zero_element(&gf.matrix().column(j)))
            .expect("nonzero composite");
        return Verdict::NotComplex {
            witness: f.matrix().column(j),
        };
    }
    let h = homology(f, g).expect("complex");
    if h.is_trivial() {
        return Verdict::Exact;
    }
    // lift homology generators: kernel lattice of g modulo im f + relations
    let node = f.codomain();
    let kernel = g.kernel();
    let lattice = Lattice::from_generators(
        &kernel
            .inclusion
            .matrix()
            .hstack(&node.relation_matrix()),
    );
    let sq = Subquotient::new(lattice, &f.matrix().hstack(&node.relation_matrix()));
    let mut witnesses: Vec<Vec<BigInt>> = (0..sq.lifts.cols()).map(|j| sq.lifts.column(j)).collect();
    for w in &mut witnesses {
        node.reduce(w);
    }
    Verdict::Homology {
        image: f.image().group,
        kernel: kernel.group,
        homology: h,
        witnesses,
    }
}

/// Per-node exactness of a fully known window. Interior nodes are always
/// checked; the end nodes only when the sequence is bounded there.
pub fn check_exact(seq: &ExactSequence) -> Result<ExactnessReport> {
    seq.validate()?;
    if !seq.is_fully_known() {
        return Err(Error::Contract(
            "check_exact needs every group and map known; use solve for partial windows".into(),
        ));
    }
    let n = seq.nodes.len();
    let map = |i: usize| seq.edges[i].state.map().expect("fully known");
    let group = |i: usize| seq.nodes[i].state.known().expect("fully known").clone();
    let mut positions = Vec::new();
    for i in 0..n {
        let incoming = if i > 0 {
            Some(map(i - 1).clone())
        } else if seq.bounded_start {
            Some(GroupHom::zero(FgAbGroup::trivial(), group(0)))
        } else {
            None
        };
        let outgoing = if i + 1 < n {
            Some(map(i).clone())
        } else if seq.bounded_end {
            Some(GroupHom::zero(group(i), FgAbGroup::trivial()))
        } else {
            None
        };
        if let (Some(f), Some(g)) = (incoming, outgoing) {
            positions.push(PositionVerdict {
                node: i,
                label: seq.nodes[i].label.clone(),
                verdict: verdict(&f, &g),
            });
        }
    }
    Ok(ExactnessReport { positions })
}
