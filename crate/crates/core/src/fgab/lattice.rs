//! Integer lattices in `Z^n` and the subquotients `L / R` that present
//! kernels, images, cokernels and homology groups.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::group::FgAbGroup;
use super::matrix::IntMatrix;
use super::snf;

/// Basis of the integer null space of `m`, one column per basis vector.
pub fn integer_kernel(m: &IntMatrix) -> IntMatrix {
    let d = snf::decompose(m);
    let r = d.rank();
    d.right.column_range(r, m.cols())
}

/// A sublattice of `Z^n` with the data needed to solve for coordinates.
#[derive(Clone, Debug)]
pub struct Lattice {
    ambient: usize,
    /// Basis vectors as columns; full column rank.
    basis: IntMatrix,
    left: IntMatrix,
    diag: Vec<BigInt>,
}

impl Lattice {
    /// Lattice spanned by the columns of `gens` (an `n x k` matrix).
    pub fn from_generators(gens: &IntMatrix) -> Self {
        let n = gens.rows();
        let d = snf::decompose(gens);
        let r = d.rank();
        let diag: Vec<BigInt> = d.diagonal_entries().into_iter().take(r).collect();
        let mut basis = d.left_inv.column_range(0, r);
        for (j, s) in diag.iter().enumerate() {
            for i in 0..n {
                basis[(i, j)] *= s;
            }
        }
        Lattice {
            ambient: n,
            basis,
            left: d.left,
            diag,
        }
    }

    pub fn full(n: usize) -> Self {
        Self::from_generators(&IntMatrix::identity(n))
    }

    pub fn rank(&self) -> usize {
        self.diag.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    /// Coordinates of `v` in the basis, or `None` when `v` is not in the lattice.
    pub fn coordinates(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        let w = self.left.mul_vec(v);
        let r = self.rank();
        if w[r..].iter().any(|x| !x.is_zero()) {
            return None;
        }
        let mut y = Vec::with_capacity(r);
        for (x, s) in w.iter().zip(&self.diag) {
            let (q, rem) = x.div_rem(s);
            if !rem.is_zero() {
                return None;
            }
            y.push(q);
        }
        Some(y)
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.coordinates(v).is_some()
    }
}

/// The group `L / span(R)` for a sublattice `span(R)` of `L`, with lifts of its
/// standard generators and the projection from lattice coordinates.
#[derive(Clone, Debug)]
pub struct Subquotient {
    pub group: FgAbGroup,
    /// Ambient lifts of the standard generators, one per column.
    pub lifts: IntMatrix,
    /// Maps lattice coordinates to group coordinates (unreduced).
    pub projection: IntMatrix,
    lattice: Lattice,
}

impl Subquotient {
    /// Panics if some column of `relations` does not lie in `lattice`.
    pub fn new(lattice: Lattice, relations: &IntMatrix) -> Self {
        let r = lattice.rank();
        let cols: Vec<Vec<BigInt>> = (0..relations.cols())
            .map(|j| {
                lattice
                    .coordinates(&relations.column(j))
                    .expect("relation outside the lattice")
            })
            .collect();
        let y = IntMatrix::from_columns(r, &cols);
        let d = snf::decompose(&y);
        let ry = d.rank();
        let diag = d.diagonal_entries();

        let mut free_idx = Vec::new();
        let mut tors_idx = Vec::new();
        for i in 0..r {
            match diag.get(i) {
                Some(e) if i < ry && e.is_one() => {}
                Some(_) if i < ry => tors_idx.push(i),
                _ => free_idx.push(i),
            }
        }
        let orders: Vec<BigInt> = tors_idx.iter().map(|&i| diag[i].clone()).collect();
        let group = FgAbGroup::from_orders(free_idx.len(), orders.iter().cloned());
        debug_assert_eq!(group.num_generators(), free_idx.len() + tors_idx.len());

        let selected: Vec<usize> = free_idx.iter().chain(&tors_idx).copied().collect();
        let lifts = &lattice.basis * &d.left_inv.select_columns(&selected);
        let projection = d.left.select_rows(&selected);
        Subquotient {
            group,
            lifts,
            projection,
            lattice,
        }
    }

    /// Group coordinates (reduced) of an ambient vector in the lattice.
    pub fn project(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        let y = self.lattice.coordinates(v)?;
        let mut z = self.projection.mul_vec(&y);
        self.group.reduce(&mut z);
        Some(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_of_row() {
        let m = IntMatrix::from_rows(&[vec![2, 4]]);
        let k = integer_kernel(&m);
        assert_eq!(k.cols(), 1);
        assert!((&m * &k).is_zero());
        // saturated: the kernel vector is primitive
        let v = k.column(0);
        assert_eq!(v[0].gcd(&v[1]), BigInt::one());
    }

    #[test]
    fn subquotient_of_even_lattice() {
        // 2Z / 8Z = Z/4
        let l = Lattice::from_generators(&IntMatrix::from_rows(&[vec![2]]));
        let sq = Subquotient::new(l, &IntMatrix::from_rows(&[vec![8]]));
        assert_eq!(sq.group, FgAbGroup::cyclic(4));
        assert_eq!(sq.project(&[BigInt::from(6)]), Some(vec![BigInt::from(3)]));
        assert_eq!(sq.project(&[BigInt::from(3)]), None);
    }
}
