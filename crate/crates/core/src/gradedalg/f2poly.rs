use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Mul};

/// A polynomial over F2 in named positively graded generators, optionally
/// truncated above a total degree.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct F2Poly {
    gens: Vec<(String, u32)>,
    /// Exponent vectors of the monomials with coefficient 1.
    terms: BTreeSet<Vec<u32>>,
    truncation: Option<u32>,
}

impl F2Poly {
    pub fn zero(gens: &[(&str, u32)], truncation: Option<u32>) -> Self {
        F2Poly {
            gens: gens.iter().map(|(n, d)| (n.to_string(), *d)).collect(),
            terms: BTreeSet::new(),
            truncation,
        }
    }

    pub fn one(gens: &[(&str, u32)], truncation: Option<u32>) -> Self {
        let mut p = Self::zero(gens, truncation);
        p.terms.insert(vec![0; gens.len()]);
        p
    }

    /// The generator named `name`, or `None` if the ring has no such generator.
    pub fn generator(gens: &[(&str, u32)], truncation: Option<u32>, name: &str) -> Option<Self> {
        let i = gens.iter().position(|(n, _)| *n == name)?;
        let mut p = Self::zero(gens, truncation);
        let mut e = vec![0; gens.len()];
        e[i] = 1;
        p.insert(e);
        Some(p)
    }

    pub fn generators(&self) -> impl Iterator<Item = (&str, u32)> {
        self.gens.iter().map(|(n, d)| (n.as_str(), *d))
    }

    pub fn truncation(&self) -> Option<u32> {
        self.truncation
    }

    pub fn with_truncation(&self, truncation: Option<u32>) -> Self {
        let mut p = F2Poly {
            gens: self.gens.clone(),
            terms: BTreeSet::new(),
            truncation,
        };
        for t in &self.terms {
            p.insert(t.clone());
        }
        p
    }

    fn degree_of(&self, e: &[u32]) -> u32 {
        e.iter().zip(&self.gens).map(|(k, (_, d))| k * d).sum()
    }

    /// Toggles a monomial, respecting truncation.
    fn insert(&mut self, e: Vec<u32>) {
        if self.truncation.is_some_and(|t| self.degree_of(&e) > t) {
            return;
        }
        if !self.terms.remove(&e) {
            self.terms.insert(e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.iter().all(|t| t.iter().all(|&k| k == 0))
    }

    /// Homogeneous component of degree `d`.
    pub fn component(&self, d: u32) -> F2Poly {
        F2Poly {
            gens: self.gens.clone(),
            terms: self
                .terms
                .iter()
                .filter(|t| self.degree_of(t) == d)
                .cloned()
                .collect(),
            truncation: self.truncation,
        }
    }

    /// Highest degree of a stored monomial.
    pub fn top_degree(&self) -> Option<u32> {
        self.terms.iter().map(|t| self.degree_of(t)).max()
    }

    fn compatible(&self, other: &F2Poly) -> Option<u32> {
        assert_eq!(self.gens, other.gens, "polynomials over different rings");
        match (self.truncation, other.truncation) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    pub fn pow(&self, k: u32) -> F2Poly {
        let mut acc = Self::one_like(self);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    fn one_like(p: &F2Poly) -> F2Poly {
        let mut q = F2Poly {
            gens: p.gens.clone(),
            terms: BTreeSet::new(),
            truncation: p.truncation,
        };
        q.terms.insert(vec![0; p.gens.len()]);
        q
    }

    /// Inverse of a polynomial with constant term 1, as a power series cut off
    /// at the truncation degree. `None` when the constant term is 0 or the
    /// polynomial is untruncated with a nonconstant part.
    pub fn inverse(&self) -> Option<F2Poly> {
        let one = Self::one_like(self);
        if !self.terms.contains(&vec![0; self.gens.len()]) {
            return None;
        }
        // 1/(1+u) = 1 + u + u^2 + ...; u^j lives in degree >= j
        let u = self + &one;
        if u.is_zero() {
            return Some(one);
        }
        let t = self.truncation?;
        let mut acc = one.clone();
        let mut power = one;
        for _ in 0..t {
            power = &power * &u;
            if power.is_zero() {
                break;
            }
            acc = &acc + &power;
        }
        Some(acc)
    }
}

impl Add for &F2Poly {
    type Output = F2Poly;
    fn add(self, other: &F2Poly) -> F2Poly {
        let truncation = self.compatible(other);
        let mut p = self.with_truncation(truncation);
        for t in &other.terms {
            p.insert(t.clone());
        }
        p
    }
}

impl Mul for &F2Poly {
    type Output = F2Poly;
    fn mul(self, other: &F2Poly) -> F2Poly {
        let truncation = self.compatible(other);
        let mut p = F2Poly {
            gens: self.gens.clone(),
            terms: BTreeSet::new(),
            truncation,
        };
        for a in &self.terms {
            for b in &other.terms {
                p.insert(a.iter().zip(b).map(|(x, y)| x + y).collect());
            }
        }
        p
    }
}

impl fmt::Display for F2Poly {
    /// Monomials by increasing degree, e.g. `1 + w2 + w3 + w2^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut terms: Vec<&Vec<u32>> = self.terms.iter().collect();
        // higher powers of earlier generators first within a degree
        terms.sort_by(|a, b| self.degree_of(a).cmp(&self.degree_of(b)).then_with(|| b.cmp(a)));
        for (i, t) in terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let factors: Vec<String> = t
                .iter()
                .zip(&self.gens)
                .filter(|(k, _)| **k > 0)
                .map(|(k, (n, _))| if *k == 1 { n.clone() } else { format!("{n}^{k}") })
                .collect();
            if factors.is_empty() {
                write!(f, "1")?;
            } else {
                write!(f, "{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const A: &[(&str, u32)] = &[("a", 1)];

    #[test]
    fn binomial_mod_two() {
        let w = &F2Poly::one(A, Some(8)) + &F2Poly::generator(A, Some(8), "a").unwrap();
        assert_eq!(w.pow(4).to_string(), "1 + a^4");
        assert_eq!(w.pow(3).to_string(), "1 + a + a^2 + a^3");
    }

    #[test]
    fn inverse_of_one_plus_a() {
        let w = &F2Poly::one(A, Some(5)) + &F2Poly::generator(A, Some(5), "a").unwrap();
        let inv = w.inverse().unwrap();
        assert_eq!(inv.to_string(), "1 + a + a^2 + a^3 + a^4 + a^5");
        assert!((&w * &inv).is_one());
    }

    #[test]
    fn truncation_drops_high_terms() {
        let a = F2Poly::generator(A, Some(2), "a").unwrap();
        assert!(a.pow(3).is_zero());
        assert_eq!(a.pow(2).top_degree(), Some(2));
    }
}
