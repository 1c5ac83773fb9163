use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::matrix::IntMatrix;
use super::snf;
use crate::error::{Error, Result};

/// A finitely generated abelian group `Z^r + Z/d_1 + ... + Z/d_k` in
/// invariant-factor form: `d_1 | d_2 | ... | d_k`, every `d_i >= 2`.
///
/// Standard generators are ordered free generators first, then torsion
/// generators in increasing invariant-factor order. Every matrix describing a
/// homomorphism uses this order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct FgAbGroup {
    free_rank: usize,
    factors: Vec<BigInt>,
}

impl FgAbGroup {
    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn free(rank: usize) -> Self {
        FgAbGroup {
            free_rank: rank,
            factors: Vec::new(),
        }
    }

    pub fn integers() -> Self {
        Self::free(1)
    }

    /// `Z/n`; `n = 0` gives `Z` and `n = 1` the trivial group.
    pub fn cyclic(n: impl Into<BigInt>) -> Self {
        Self::from_orders(0, [n.into()])
    }

    /// Normalizes an arbitrary direct sum `Z^rank + Z/o_1 + ...`. Orders equal
    /// to zero count as free summands, orders equal to one are dropped.
    pub fn from_orders(rank: usize, orders: impl IntoIterator<Item = BigInt>) -> Self {
        let orders: Vec<BigInt> = orders.into_iter().map(|o| o.abs()).collect();
        let extra_free = orders.iter().filter(|o| o.is_zero()).count();
        let nonzero: Vec<BigInt> = orders.into_iter().filter(|o| !o.is_zero()).collect();
        let n = nonzero.len();
        let torsion = cokernel(&IntMatrix::diagonal(n, n, &nonzero));
        FgAbGroup {
            free_rank: rank + extra_free,
            factors: torsion.factors,
        }
    }

    pub fn from_factors(rank: usize, factors: &[u64]) -> Self {
        Self::from_orders(rank, factors.iter().map(|&d| BigInt::from(d)))
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.factors
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.factors.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    pub fn is_torsion_free(&self) -> bool {
        self.factors.is_empty()
    }

    /// Order of the group, `None` when infinite.
    pub fn order(&self) -> Option<BigInt> {
        self.is_finite().then(|| self.torsion_order())
    }

    pub fn torsion_order(&self) -> BigInt {
        self.factors.iter().fold(BigInt::one(), |acc, d| acc * d)
    }

    pub fn order_u64(&self) -> Option<u64> {
        self.order().and_then(|o| o.to_u64())
    }

    /// Torsion subgroup.
    pub fn torsion(&self) -> FgAbGroup {
        FgAbGroup {
            free_rank: 0,
            factors: self.factors.clone(),
        }
    }

    /// Exponent of the torsion subgroup (1 when torsion-free).
    pub fn torsion_exponent(&self) -> BigInt {
        self.factors.last().cloned().unwrap_or_else(BigInt::one)
    }

    pub fn direct_sum(&self, other: &FgAbGroup) -> FgAbGroup {
        Self::from_orders(
            self.free_rank + other.free_rank,
            self.factors.iter().chain(&other.factors).cloned(),
        )
    }

    pub fn num_generators(&self) -> usize {
        self.free_rank + self.factors.len()
    }

    /// Order of each standard generator, with `0` for free generators.
    pub fn generator_orders(&self) -> Vec<BigInt> {
        std::iter::repeat_n(BigInt::zero(), self.free_rank)
            .chain(self.factors.iter().cloned())
            .collect()
    }

    /// Relation matrix on the standard generators: one column per torsion generator.
    pub fn relation_matrix(&self) -> IntMatrix {
        let n = self.num_generators();
        let mut r = IntMatrix::zeros(n, self.factors.len());
        for (k, d) in self.factors.iter().enumerate() {
            r[(self.free_rank + k, k)] = d.clone();
        }
        r
    }

    /// Reduces a coordinate vector to its normal form (torsion coordinates in `0..d`).
    pub fn reduce(&self, v: &mut [BigInt]) {
        debug_assert_eq!(v.len(), self.num_generators());
        for (k, d) in self.factors.iter().enumerate() {
            let x = &mut v[self.free_rank + k];
            *x = x.mod_floor(d);
        }
    }

    pub fn is_zero_element(&self, v: &[BigInt]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(Zero::is_zero)
    }

    /// Every element of a finite group in normal form, in lexicographic order.
    pub fn elements(&self) -> Result<Vec<Vec<BigInt>>> {
        let order = self
            .order_u64()
            .ok_or_else(|| Error::Unsupported(format!("cannot list elements of infinite group {self}")))?;
        if order > 1 << 20 {
            return Err(Error::Unsupported(format!("group {self} too large to enumerate")));
        }
        let mut out = vec![Vec::new()];
        for d in &self.factors {
            let d = d.to_u64().expect("bounded by order");
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..d).map(move |x| {
                        let mut p = prefix.clone();
                        p.push(BigInt::from(x));
                        p
                    })
                })
                .collect();
        }
        Ok(out)
    }

    /// Additive order of an element, `None` when it has infinite order.
    pub fn element_order(&self, v: &[BigInt]) -> Option<BigInt> {
        if v[..self.free_rank].iter().any(|x| !x.is_zero()) {
            return None;
        }
        let mut ord = BigInt::one();
        for (k, d) in self.factors.iter().enumerate() {
            let x = v[self.free_rank + k].mod_floor(d);
            let o = d / x.gcd(d);
            ord = ord.lcm(&o);
        }
        Some(ord)
    }
}

/// Cokernel of `m`, viewed as relations (columns) on `m.rows()` generators.
pub fn cokernel(m: &IntMatrix) -> FgAbGroup {
    let d = snf::decompose(m);
    let rank = d.rank();
    let factors: Vec<BigInt> = d
        .diagonal_entries()
        .into_iter()
        .take(rank)
        .filter(|x| !x.is_one())
        .collect();
    FgAbGroup {
        free_rank: m.rows() - rank,
        factors,
    }
}

/// Splits a group into its torsion subgroup and free rank.
pub fn torsion_and_rank(g: &FgAbGroup) -> (FgAbGroup, usize) {
    (g.torsion(), g.free_rank())
}

impl fmt::Display for FgAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut first = true;
        let mut sep = |f: &mut fmt::Formatter<'_>| -> fmt::Result {
            if !first {
                write!(f, "+")?;
            }
            first = false;
            Ok(())
        };
        for _ in 0..self.free_rank {
            sep(f)?;
            write!(f, "Z")?;
        }
        for d in &self.factors {
            sep(f)?;
            write!(f, "Z/{d}")?;
        }
        Ok(())
    }
}

struct Cursor<'a> {
    chars: Vec<char>,
    pos: usize,
    _src: &'a str,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor {
            chars: src.chars().collect(),
            pos: 0,
            _src: src,
        }
    }

    fn location(&self, pos: usize) -> (usize, usize) {
        let mut line = 1;
        let mut col = 1;
        for &c in &self.chars[..pos.min(self.chars.len())] {
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        }
        (line, col)
    }

    fn error(&self, pos: usize, msg: impl Into<String>) -> Error {
        let (line, column) = self.location(pos);
        Error::parse(line, column, msg)
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        match self.peek() {
            Some(x) if x == c => {
                self.pos += 1;
                Ok(())
            }
            Some(x) => Err(self.error(self.pos, format!("expected '{c}', found '{x}'"))),
            None => Err(self.error(self.pos, format!("expected '{c}', found end of input"))),
        }
    }

    fn posint(&mut self) -> Result<(BigInt, usize)> {
        self.skip_ws();
        let start = self.pos;
        let mut digits = String::new();
        loop {
            match self.chars.get(self.pos) {
                Some(c) if c.is_ascii_digit() => {
                    digits.push(*c);
                    self.pos += 1;
                }
                // whitespace is insignificant, even between digits
                Some(c) if c.is_whitespace() && !digits.is_empty() => {
                    let save = self.pos;
                    self.skip_ws();
                    if !matches!(self.chars.get(self.pos), Some(d) if d.is_ascii_digit()) {
                        self.pos = save;
                        break;
                    }
                }
                _ => break,
            }
        }
        if digits.is_empty() {
            return Err(self.error(start, "expected a positive integer"));
        }
        Ok((digits.parse().expect("ascii digits"), start))
    }
}

impl FromStr for FgAbGroup {
    type Err = Error;

    /// Parses `group := "0" | term ("+" term)*`, `term := "Z" | "Z/" posint`.
    fn from_str(s: &str) -> Result<Self> {
        let mut cur = Cursor::new(s);
        match cur.peek() {
            None => return Err(cur.error(cur.pos, "empty group expression")),
            Some('0') => {
                cur.pos += 1;
                return match cur.peek() {
                    None => Ok(FgAbGroup::trivial()),
                    Some(c) => Err(cur.error(cur.pos, format!("unexpected '{c}' after 0"))),
                };
            }
            _ => {}
        }
        let mut rank = 0usize;
        let mut orders = Vec::new();
        loop {
            cur.expect('Z')?;
            if cur.peek() == Some('/') {
                cur.pos += 1;
                let (n, at) = cur.posint()?;
                if n.is_zero() || n.is_one() {
                    return Err(cur.error(at, format!("invalid cyclic order Z/{n}")));
                }
                orders.push(n);
            } else {
                rank += 1;
            }
            match cur.peek() {
                None => break,
                Some('+') => cur.pos += 1,
                Some(c) => return Err(cur.error(cur.pos, format!("unexpected '{c}'"))),
            }
        }
        Ok(FgAbGroup::from_orders(rank, orders))
    }
}

impl Serialize for FgAbGroup {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FgAbGroup {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> FgAbGroup {
        s.parse().unwrap()
    }

    #[test]
    fn cokernel_examples() {
        assert_eq!(cokernel(&IntMatrix::from_rows(&[vec![2]])), g("Z/2"));
        assert_eq!(
            cokernel(&IntMatrix::from_rows(&[vec![2, 0], vec![0, 0]])),
            g("Z+Z/2")
        );
        let m = IntMatrix::from_rows(&[vec![1, 0, 0], vec![0, 4, 0], vec![0, 0, 0]]);
        assert_eq!(cokernel(&m), g("Z+Z/4"));
    }

    #[test]
    fn torsion_split() {
        assert_eq!(torsion_and_rank(&g("Z+Z/8")), (g("Z/8"), 1));
        assert_eq!(torsion_and_rank(&g("Z")), (FgAbGroup::trivial(), 1));
        assert_eq!(torsion_and_rank(&g("Z/2+Z/2")), (g("Z/2+Z/2"), 0));
    }

    #[test]
    fn normalization() {
        assert_eq!(g("Z/2+Z/3"), g("Z/6"));
        assert_eq!(g("Z/8 + Z + Z/2").to_string(), "Z+Z/2+Z/8");
        assert_eq!(g("Z/4+Z/6").invariant_factors(), &[BigInt::from(2), BigInt::from(12)]);
        assert_eq!(FgAbGroup::cyclic(1), FgAbGroup::trivial());
        assert_eq!(FgAbGroup::cyclic(0), FgAbGroup::integers());
    }

    #[test]
    fn parser_rejects() {
        for bad in ["", "Z/0", "Z/1", "0+Z", "Z+", "Z/", "Q", "Z/2+0", "Z//2"] {
            assert!(bad.parse::<FgAbGroup>().is_err(), "{bad:?} should not parse");
        }
        match "Z+Z/1".parse::<FgAbGroup>() {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (1, 5)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn whitespace_insignificant() {
        assert_eq!(g(" Z / 1 6 "), g("Z/16"));
        assert_eq!(g("\n0\n"), FgAbGroup::trivial());
    }

    #[test]
    fn element_orders() {
        let z2z8 = g("Z/2+Z/8");
        let v = vec![BigInt::from(1), BigInt::from(2)];
        assert_eq!(z2z8.element_order(&v), Some(BigInt::from(4)));
        assert_eq!(z2z8.elements().unwrap().len(), 16);
    }
}
