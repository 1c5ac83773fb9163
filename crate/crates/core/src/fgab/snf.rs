//! Smith normal form over the integers with unimodular transforms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::matrix::IntMatrix;

/// Full decomposition `left * m * right = diag`, together with the inverses of
/// the transforms. `diag` has nonnegative entries with each one dividing the next,
/// and its nonzero entries come first.
#[derive(Clone, Debug)]
pub struct Snf {
    pub left: IntMatrix,
    pub left_inv: IntMatrix,
    pub diag: IntMatrix,
    pub right: IntMatrix,
    pub right_inv: IntMatrix,
}

impl Snf {
    /// Number of nonzero diagonal entries.
    pub fn rank(&self) -> usize {
        let n = self.diag.rows().min(self.diag.cols());
        (0..n).take_while(|&i| !self.diag[(i, i)].is_zero()).count()
    }

    pub fn diagonal_entries(&self) -> Vec<BigInt> {
        let n = self.diag.rows().min(self.diag.cols());
        (0..n).map(|i| self.diag[(i, i)].clone()).collect()
    }
}

/// Returns `(U, S, V)` with `U * m * V = S`.
pub fn smith_normal_form(m: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let snf = decompose(m);
    (snf.left, snf.diag, snf.right)
}

struct Work {
    s: IntMatrix,
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
    v_inv: IntMatrix,
}

impl Work {
    fn swap_rows(&mut self, a: usize, b: usize) {
        self.s.swap_rows(a, b);
        self.u.swap_rows(a, b);
        self.u_inv.swap_cols(a, b);
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        self.s.swap_cols(a, b);
        self.v.swap_cols(a, b);
        self.v_inv.swap_rows(a, b);
    }

    fn add_row(&mut self, target: usize, source: usize, k: &BigInt) {
        self.s.add_row_multiple(target, source, k);
        self.u.add_row_multiple(target, source, k);
        self.u_inv.add_col_multiple(source, target, &-k);
    }

    fn add_col(&mut self, target: usize, source: usize, k: &BigInt) {
        self.s.add_col_multiple(target, source, k);
        self.v.add_col_multiple(target, source, k);
        self.v_inv.add_row_multiple(source, target, &-k);
    }

    fn negate_row(&mut self, i: usize) {
        self.s.negate_row(i);
        self.u.negate_row(i);
        self.u_inv.negate_col(i);
    }

    /// Position of a nonzero entry of least absolute value in the
    /// lower-right block starting at `(t, t)`.
    fn pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.s.rows() {
            for j in t..self.s.cols() {
                let x = &self.s[(i, j)];
                if x.is_zero() {
                    continue;
                }
                match best {
                    Some(b) if self.s[b].abs() <= x.abs() => {}
                    _ => best = Some((i, j)),
                }
            }
        }
        best
    }
}

pub fn decompose(m: &IntMatrix) -> Snf {
    let (rows, cols) = (m.rows(), m.cols());
    let mut w = Work {
        s: m.clone(),
        u: IntMatrix::identity(rows),
        u_inv: IntMatrix::identity(rows),
        v: IntMatrix::identity(cols),
        v_inv: IntMatrix::identity(cols),
    };

    for t in 0..rows.min(cols) {
        while let Some((pi, pj)) = w.pivot(t) {
            w.swap_rows(t, pi);
            w.swap_cols(t, pj);
            let p = w.s[(t, t)].clone();

            let mut clean = true;
            for i in t + 1..rows {
                let q = w.s[(i, t)].div_floor(&p);
                w.add_row(i, t, &-q);
                if !w.s[(i, t)].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                let q = w.s[(t, j)].div_floor(&p);
                w.add_col(j, t, &-q);
                if !w.s[(t, j)].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }

            // Row t and column t are clear; enforce divisibility of the rest.
            let offender = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !w.s[(i, j)].is_multiple_of(&p));
            match offender {
                Some((i, _)) => {
                    let one = BigInt::from(1);
                    w.add_row(t, i, &one);
                }
                None => break,
            }
        }
        if w.s[(t, t)].is_negative() {
            w.negate_row(t);
        }
    }

    Snf {
        left: w.u,
        left_inv: w.u_inv,
        diag: w.s,
        right: w.v,
        right_inv: w.v_inv,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(m: &IntMatrix) -> Snf {
        let d = decompose(m);
        assert_eq!(&(&d.left * m) * &d.right, d.diag);
        assert_eq!(&d.left * &d.left_inv, IntMatrix::identity(m.rows()));
        assert_eq!(&d.right * &d.right_inv, IntMatrix::identity(m.cols()));
        d
    }

    #[test]
    fn identity_is_fixed() {
        let i = IntMatrix::identity(2);
        let (u, s, v) = smith_normal_form(&i);
        assert_eq!(u, i);
        assert_eq!(s, i);
        assert_eq!(v, i);
    }

    #[test]
    fn two_by_two_example() {
        // gcd of entries is 2 and |det| = 8, so the diagonal must be (2, 4).
        let m = IntMatrix::from_rows(&[vec![2, 4], vec![6, 8]]);
        let d = check(&m);
        assert_eq!(d.diag, IntMatrix::from_rows(&[vec![2, 0], vec![0, 4]]));
    }

    #[test]
    fn zero_matrix() {
        let z = IntMatrix::zeros(3, 2);
        let (u, s, v) = smith_normal_form(&z);
        assert_eq!(u, IntMatrix::identity(3));
        assert_eq!(s, z);
        assert_eq!(v, IntMatrix::identity(2));
    }

    #[test]
    fn divisibility_repair() {
        // diag(2, 3) is diagonal but not in normal form.
        let m = IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]);
        let d = check(&m);
        assert_eq!(d.diagonal_entries(), vec![BigInt::from(1), BigInt::from(6)]);
    }

    #[test]
    fn empty_shapes() {
        check(&IntMatrix::zeros(0, 3));
        check(&IntMatrix::zeros(2, 0));
    }
}
