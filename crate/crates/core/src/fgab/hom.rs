use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use super::group::FgAbGroup;
use super::lattice::{integer_kernel, Lattice, Subquotient};
use super::matrix::IntMatrix;
use crate::error::{Error, Result};

/// Homomorphism between finitely generated abelian groups. The matrix has one
/// column per standard generator of the domain, holding the coordinates of its
/// image. Columns are kept reduced modulo the codomain relations, so structural
/// equality is equality of homomorphisms.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GroupHom {
    domain: FgAbGroup,
    codomain: FgAbGroup,
    matrix: IntMatrix,
}

/// A subgroup together with its inclusion into the ambient group.
#[derive(Clone, Debug)]
pub struct Subgroup {
    pub group: FgAbGroup,
    pub inclusion: GroupHom,
}

impl GroupHom {
    pub fn new(domain: FgAbGroup, codomain: FgAbGroup, mut matrix: IntMatrix) -> Result<Self> {
        if matrix.rows() != codomain.num_generators() || matrix.cols() != domain.num_generators() {
            return Err(Error::Presentation(format!(
                "matrix is {}x{} but {domain} -> {codomain} needs {}x{}",
                matrix.rows(),
                matrix.cols(),
                codomain.num_generators(),
                domain.num_generators()
            )));
        }
        let orders = domain.generator_orders();
        let cod_orders = codomain.generator_orders();
        for (j, d) in orders.iter().enumerate() {
            if d.is_zero() {
                continue;
            }
            for (i, e) in cod_orders.iter().enumerate() {
                let x = &matrix[(i, j)];
                let killed = if e.is_zero() {
                    x.is_zero()
                } else {
                    (x * d).is_multiple_of(e)
                };
                if !killed {
                    return Err(Error::Presentation(format!(
                        "generator {} of {domain} has order {d} but its image is not killed by {d} in {codomain}",
                        j + 1
                    )));
                }
            }
        }
        for j in 0..matrix.cols() {
            for (i, e) in cod_orders.iter().enumerate() {
                if !e.is_zero() {
                    let r = matrix[(i, j)].mod_floor(e);
                    matrix[(i, j)] = r;
                }
            }
        }
        Ok(GroupHom {
            domain,
            codomain,
            matrix,
        })
    }

    pub fn from_rows(domain: FgAbGroup, codomain: FgAbGroup, rows: &[Vec<i64>]) -> Result<Self> {
        let m = if rows.is_empty() {
            IntMatrix::zeros(0, domain.num_generators())
        } else {
            IntMatrix::from_rows(rows)
        };
        Self::new(domain, codomain, m)
    }

    pub fn zero(domain: FgAbGroup, codomain: FgAbGroup) -> Self {
        let m = IntMatrix::zeros(codomain.num_generators(), domain.num_generators());
        GroupHom {
            domain,
            codomain,
            matrix: m,
        }
    }

    pub fn identity(g: &FgAbGroup) -> Self {
        Self::scalar(g, 1)
    }

    /// Multiplication by `k` on `g`.
    pub fn scalar(g: &FgAbGroup, k: i64) -> Self {
        let n = g.num_generators();
        Self::new(g.clone(), g.clone(), IntMatrix::identity(n).scale(&BigInt::from(k)))
            .expect("scalar maps respect every relation")
    }

    pub fn domain(&self) -> &FgAbGroup {
        &self.domain
    }

    pub fn codomain(&self) -> &FgAbGroup {
        &self.codomain
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        let mut w = self.matrix.mul_vec(v);
        self.codomain.reduce(&mut w);
        w
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &GroupHom) -> Result<GroupHom> {
        if first.codomain != self.domain {
            return Err(Error::Presentation(format!(
                "cannot compose {} -> {} after {} -> {}",
                self.domain, self.codomain, first.domain, first.codomain
            )));
        }
        GroupHom::new(
            first.domain.clone(),
            self.codomain.clone(),
            &self.matrix * &first.matrix,
        )
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().group.is_trivial()
    }

    pub fn is_surjective(&self) -> bool {
        self.cokernel().0.is_trivial()
    }

    /// `[M | R_codomain]`: the image of `Z^n` together with the codomain relations.
    fn extended(&self) -> IntMatrix {
        self.matrix.hstack(&self.codomain.relation_matrix())
    }

    /// Sublattice of `Z^{domain gens}` mapping to zero in the codomain.
    fn preimage_of_zero(&self) -> Lattice {
        let n = self.domain.num_generators();
        let k = integer_kernel(&self.extended());
        Lattice::from_generators(&k.row_range(0, n))
    }

    pub fn kernel(&self) -> Subgroup {
        let sq = Subquotient::new(self.preimage_of_zero(), &self.domain.relation_matrix());
        let inclusion = GroupHom::new(sq.group.clone(), self.domain.clone(), sq.lifts)
            .expect("kernel inclusion is well defined");
        Subgroup {
            group: sq.group,
            inclusion,
        }
    }

    pub fn image(&self) -> Subgroup {
        let lattice = Lattice::from_generators(&self.extended());
        let sq = Subquotient::new(lattice, &self.codomain.relation_matrix());
        let inclusion = GroupHom::new(sq.group.clone(), self.codomain.clone(), sq.lifts)
            .expect("image inclusion is well defined");
        Subgroup {
            group: sq.group,
            inclusion,
        }
    }

    /// Cokernel with the quotient map from the codomain.
    pub fn cokernel(&self) -> (FgAbGroup, GroupHom) {
        quotient_by_matrix(&self.codomain, &self.matrix)
    }
}

/// Quotient of `g` by the subgroup generated by the columns of `gens`, with the
/// projection map.
pub fn quotient_by_matrix(g: &FgAbGroup, gens: &IntMatrix) -> (FgAbGroup, GroupHom) {
    let n = g.num_generators();
    let sq = Subquotient::new(Lattice::full(n), &gens.hstack(&g.relation_matrix()));
    let cols: Vec<Vec<BigInt>> = (0..n)
        .map(|j| {
            let mut e = vec![BigInt::zero(); n];
            e[j] = BigInt::from(1);
            sq.project(&e).expect("full lattice")
        })
        .collect();
    let proj = IntMatrix::from_columns(sq.group.num_generators(), &cols);
    let hom = GroupHom::new(g.clone(), sq.group.clone(), proj).expect("projection is well defined");
    (sq.group, hom)
}

/// `ker g / im f` for composable `f: A -> B`, `g: B -> C` with `g ∘ f = 0`.
pub fn homology(f: &GroupHom, g: &GroupHom) -> Result<FgAbGroup> {
    let gf = g.compose(f)?;
    if !gf.is_zero() {
        return Err(Error::Contract(format!(
            "maps {} -> {} -> {} do not compose to zero",
            f.domain, f.codomain, g.codomain
        )));
    }
    let sq = Subquotient::new(g.preimage_of_zero(), &f.extended());
    Ok(sq.group)
}

/// Returns `(ker f, im f, coker f)`.
pub fn kernel_image_cokernel(f: &GroupHom) -> (FgAbGroup, FgAbGroup, FgAbGroup) {
    (f.kernel().group, f.image().group, f.cokernel().0)
}

impl fmt::Display for GroupHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {} {}", self.domain, self.codomain, self.matrix)
    }
}
