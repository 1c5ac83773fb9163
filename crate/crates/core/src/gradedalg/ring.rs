use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::fgab::{quotient_by_matrix, FgAbGroup, GroupHom, IntMatrix};

pub type Monomial = Vec<u32>;

/// Default cap on the total exponent of a basis monomial.
pub const DEFAULT_EXPONENT_BOUND: u32 = 16;

/// Integer polynomial in the generators of a ring; no zero coefficients stored.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct IntPoly(BTreeMap<Monomial, BigInt>);

impl IntPoly {
    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.0.iter()
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        let e = self.0.entry(m.clone()).or_insert_with(BigInt::zero);
        *e += c;
        if e.is_zero() {
            self.0.remove(&m);
        }
    }

    fn mul(&self, other: &IntPoly) -> IntPoly {
        let mut out = IntPoly::default();
        for (a, x) in &self.0 {
            for (b, y) in &other.0 {
                out.add_term(a.iter().zip(b).map(|(i, j)| i + j).collect(), x * y);
            }
        }
        out
    }
}

/// A homogeneous element of a graded ring.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GradedElement {
    degree: i64,
    poly: IntPoly,
}

impl GradedElement {
    pub fn zero(degree: i64) -> Self {
        GradedElement {
            degree,
            poly: IntPoly::default(),
        }
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn poly(&self) -> &IntPoly {
        &self.poly
    }

    /// Whether the representing polynomial is zero (not whether the class is).
    pub fn is_formally_zero(&self) -> bool {
        self.poly.is_zero()
    }
}

#[derive(Debug)]
struct DegreeData {
    basis: Vec<Monomial>,
    group: FgAbGroup,
    projection: GroupHom,
}

/// A commutative Z-graded ring presented by generators and homogeneous relations.
/// Degree components are computed on demand and cached.
#[derive(Debug)]
pub struct GradedRing {
    name: String,
    gens: Vec<(String, i64)>,
    relations: Vec<(i64, IntPoly)>,
    exponent_bound: u32,
    cache: Mutex<BTreeMap<i64, Arc<DegreeData>>>,
}

impl Clone for GradedRing {
    fn clone(&self) -> Self {
        GradedRing {
            name: self.name.clone(),
            gens: self.gens.clone(),
            relations: self.relations.clone(),
            exponent_bound: self.exponent_bound,
            cache: Mutex::new(self.cache.lock().expect("cache lock").clone()),
        }
    }
}

impl GradedRing {
    /// Builds a ring from generator degrees and relation strings such as
    /// `"v^2 - 4*w"`.
    pub fn new(name: &str, gens: &[(&str, i64)], relations: &[&str]) -> Result<Self> {
        let mut ring = GradedRing {
            name: name.to_string(),
            gens: gens.iter().map(|(n, d)| (n.to_string(), *d)).collect(),
            relations: Vec::new(),
            exponent_bound: DEFAULT_EXPONENT_BOUND,
            cache: Mutex::new(BTreeMap::new()),
        };
        for r in relations {
            let e = ring.parse_element(r)?;
            if e.poly.is_zero() {
                continue;
            }
            ring.relations.push((e.degree, e.poly));
        }
        Ok(ring)
    }

    pub fn with_exponent_bound(mut self, bound: u32) -> Self {
        self.exponent_bound = bound;
        self.cache = Mutex::new(BTreeMap::new());
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn generators(&self) -> impl Iterator<Item = (&str, i64)> {
        self.gens.iter().map(|(n, d)| (n.as_str(), *d))
    }

    fn mono_degree(&self, m: &[u32]) -> i64 {
        m.iter().zip(&self.gens).map(|(&k, (_, d))| k as i64 * d).sum()
    }

    pub fn generator(&self, name: &str) -> Result<GradedElement> {
        let i = self
            .gens
            .iter()
            .position(|(n, _)| n == name)
            .ok_or_else(|| Error::Contract(format!("{} has no generator {name}", self.name)))?;
        let mut m = vec![0; self.gens.len()];
        m[i] = 1;
        let mut poly = IntPoly::default();
        poly.add_term(m, BigInt::one());
        Ok(GradedElement {
            degree: self.gens[i].1,
            poly,
        })
    }

    pub fn one(&self) -> GradedElement {
        let mut poly = IntPoly::default();
        poly.add_term(vec![0; self.gens.len()], BigInt::one());
        GradedElement { degree: 0, poly }
    }

    pub fn mul(&self, a: &GradedElement, b: &GradedElement) -> GradedElement {
        GradedElement {
            degree: a.degree + b.degree,
            poly: a.poly.mul(&b.poly),
        }
    }

    pub fn add(&self, a: &GradedElement, b: &GradedElement) -> Result<GradedElement> {
        if a.degree != b.degree && !a.poly.is_zero() && !b.poly.is_zero() {
            return Err(Error::Contract(format!(
                "cannot add elements of degrees {} and {}",
                a.degree, b.degree
            )));
        }
        let mut poly = a.poly.clone();
        for (m, c) in &b.poly.0 {
            poly.add_term(m.clone(), c.clone());
        }
        let degree = if a.poly.is_zero() { b.degree } else { a.degree };
        Ok(GradedElement { degree, poly })
    }

    /// Parses `term (("+"|"-") term)*` with `term := [int "*"] factor ("*" factor)*`,
    /// `factor := ident ["^" int] | int`. The result must be homogeneous.
    pub fn parse_element(&self, src: &str) -> Result<GradedElement> {
        let toks = tokenize(src)?;
        let mut pos = 0;
        let mut poly = IntPoly::default();
        let mut sign = BigInt::one();
        if let Some(Tok::Sym('-', _)) = toks.first() {
            sign = -sign;
            pos += 1;
        }
        loop {
            let mut coef = sign.clone();
            let mut mono = vec![0u32; self.gens.len()];
            loop {
                match toks.get(pos) {
                    Some(Tok::Int(n, _)) => {
                        coef *= n;
                        pos += 1;
                    }
                    Some(Tok::Ident(name, col)) => {
                        let i = self.gens.iter().position(|(g, _)| g == name).ok_or_else(|| {
                            Error::parse(1, *col, format!("unknown generator {name:?}"))
                        })?;
                        pos += 1;
                        let mut e = 1u32;
                        if let Some(Tok::Sym('^', _)) = toks.get(pos) {
                            match toks.get(pos + 1) {
                                Some(Tok::Int(n, col)) => {
                                    e = u32::try_from(n).map_err(|_| {
                                        Error::parse(1, *col, "exponent too large")
                                    })?;
                                    pos += 2;
                                }
                                other => return Err(unexpected(other, src)),
                            }
                        }
                        mono[i] += e;
                    }
                    other => return Err(unexpected(other, src)),
                }
                match toks.get(pos) {
                    Some(Tok::Sym('*', _)) => pos += 1,
                    _ => break,
                }
            }
            poly.add_term(mono, coef);
            match toks.get(pos) {
                None => break,
                Some(Tok::Sym('+', _)) => sign = BigInt::one(),
                Some(Tok::Sym('-', _)) => sign = -BigInt::one(),
                other => return Err(unexpected(other, src)),
            }
            pos += 1;
        }
        let degrees: BTreeSet<i64> = poly.0.keys().map(|m| self.mono_degree(m)).collect();
        if degrees.len() > 1 {
            return Err(Error::Presentation(format!("{src:?} is not homogeneous")));
        }
        Ok(GradedElement {
            degree: degrees.into_iter().next().unwrap_or(0),
            poly,
        })
    }

    /// Monomials that are zero because a relation is a unit multiple of one monomial.
    fn killed_monomials(&self) -> Vec<&Monomial> {
        self.relations
            .iter()
            .filter_map(|(_, p)| {
                let mut it = p.0.iter();
                match (it.next(), it.next()) {
                    (Some((m, c)), None) if c.abs().is_one() => Some(m),
                    _ => None,
                }
            })
            .collect()
    }

    fn is_killed(killed: &[&Monomial], m: &[u32]) -> bool {
        killed
            .iter()
            .any(|k| k.iter().zip(m).all(|(a, b)| a <= b))
    }

    /// All live monomials of degree `d`: those not divisible by a killed monomial.
    fn monomials_of_degree(&self, d: i64) -> Result<Vec<Monomial>> {
        let n = self.gens.len();
        let killed = self.killed_monomials();
        // a pure power x^k among the killed monomials bounds the exponent of x
        let mut cap: Vec<Option<u32>> = vec![None; n];
        for k in &killed {
            let support: Vec<usize> = (0..n).filter(|&i| k[i] > 0).collect();
            if let [i] = support[..] {
                let c = k[i] - 1;
                cap[i] = Some(cap[i].map_or(c, |old| old.min(c)));
            }
        }
        let unbounded: Vec<usize> = (0..n).filter(|&i| cap[i].is_none()).collect();
        let signs: BTreeSet<i64> = unbounded.iter().map(|&i| self.gens[i].1.signum()).collect();
        if signs.contains(&0) || signs.len() > 1 {
            return Err(Error::Unsupported(format!(
                "{} has an unbounded monomial basis in degree {d}",
                self.name
            )));
        }
        let bounded: Vec<usize> = (0..n).filter(|&i| cap[i].is_some()).collect();

        let mut out = Vec::new();
        let mut mono = vec![0u32; n];
        let mut result = Ok(());
        self.walk_bounded(&bounded, 0, &cap, &mut mono, &mut |m: &mut Monomial, ring: &Self| {
            let rest = d - ring.mono_degree(m);
            ring.walk_unbounded(&unbounded, 0, rest, m, &mut |full: &Monomial| {
                if Self::is_killed(&killed, full) {
                    return;
                }
                let total: u32 = full.iter().sum();
                if total > ring.exponent_bound {
                    result = Err(Error::Unsupported(format!(
                        "degree {d} of {} needs monomials beyond total exponent {}",
                        ring.name, ring.exponent_bound
                    )));
                    return;
                }
                out.push(full.clone());
            });
        });
        result?;
        out.sort();
        Ok(out)
    }

    fn walk_bounded(
        &self,
        idx: &[usize],
        k: usize,
        cap: &[Option<u32>],
        mono: &mut Monomial,
        f: &mut dyn FnMut(&mut Monomial, &Self),
    ) {
        if k == idx.len() {
            f(mono, self);
            return;
        }
        let i = idx[k];
        for e in 0..=cap[i].expect("bounded generator") {
            mono[i] = e;
            self.walk_bounded(idx, k + 1, cap, mono, f);
        }
        mono[i] = 0;
    }

    /// Distributes the remaining degree over generators of one common sign.
    fn walk_unbounded(
        &self,
        idx: &[usize],
        k: usize,
        rest: i64,
        mono: &mut Monomial,
        f: &mut dyn FnMut(&Monomial),
    ) {
        if k == idx.len() {
            if rest == 0 {
                f(mono);
            }
            return;
        }
        let i = idx[k];
        let d = self.gens[i].1;
        let base = mono[i];
        let mut e = 0u32;
        loop {
            let r = rest - e as i64 * d;
            // remaining degree must keep the sign of the generators
            if r != 0 && r.signum() != d.signum() {
                break;
            }
            mono[i] = base + e;
            self.walk_unbounded(idx, k + 1, r, mono, f);
            if r == 0 {
                break;
            }
            e += 1;
        }
        mono[i] = base;
    }

    fn degree_data(&self, d: i64) -> Result<Arc<DegreeData>> {
        if let Some(data) = self.cache.lock().expect("cache lock").get(&d) {
            return Ok(data.clone());
        }
        let basis = self.monomials_of_degree(d)?;
        let index: BTreeMap<&Monomial, usize> = basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let killed = self.killed_monomials();
        let mut columns: Vec<Vec<BigInt>> = Vec::new();
        for (e, r) in &self.relations {
            for m in self.monomials_of_degree(d - e)? {
                let mut col = vec![BigInt::zero(); basis.len()];
                for (t, c) in &r.0 {
                    let prod: Monomial = t.iter().zip(&m).map(|(a, b)| a + b).collect();
                    if Self::is_killed(&killed, &prod) {
                        continue;
                    }
                    col[index[&prod]] += c;
                }
                if col.iter().any(|x| !x.is_zero()) {
                    columns.push(col);
                }
            }
        }
        let rel = IntMatrix::from_columns(basis.len(), &columns);
        let (group, projection) = quotient_by_matrix(&FgAbGroup::free(basis.len()), &rel);
        let data = Arc::new(DegreeData {
            basis,
            group,
            projection,
        });
        self.cache.lock().expect("cache lock").insert(d, data.clone());
        Ok(data)
    }

    /// Monomial basis of degree `d` before relations are imposed.
    pub fn basis(&self, d: i64) -> Result<Vec<Monomial>> {
        Ok(self.degree_data(d)?.basis.clone())
    }

    /// Coordinates of `x` in the standard generators of its degree's group.
    pub fn class_of(&self, x: &GradedElement) -> Result<(FgAbGroup, Vec<BigInt>)> {
        let data = self.degree_data(x.degree)?;
        let killed = self.killed_monomials();
        let mut v = vec![BigInt::zero(); data.basis.len()];
        for (m, c) in &x.poly.0 {
            if Self::is_killed(&killed, m) {
                continue;
            }
            let i = data
                .basis
                .iter()
                .position(|b| b == m)
                .expect("live monomial of the right degree");
            v[i] += c;
        }
        Ok((data.group.clone(), data.projection.apply(&v)))
    }

    /// Whether `x` is zero in the ring.
    pub fn is_zero(&self, x: &GradedElement) -> Result<bool> {
        if x.poly.is_zero() {
            return Ok(true);
        }
        let (g, v) = self.class_of(x)?;
        Ok(g.is_zero_element(&v))
    }

    pub fn format_element(&self, x: &GradedElement) -> String {
        if x.poly.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (m, c) in &x.poly.0 {
            let factors: Vec<String> = m
                .iter()
                .zip(&self.gens)
                .filter(|(k, _)| **k > 0)
                .map(|(k, (n, _))| if *k == 1 { n.clone() } else { format!("{n}^{k}") })
                .collect();
            let body = factors.join("*");
            let a = c.abs();
            let term = match (body.is_empty(), a.is_one()) {
                (true, _) => a.to_string(),
                (false, true) => body,
                (false, false) => format!("{a}*{body}"),
            };
            parts.push((c.is_negative(), term));
        }
        let mut s = String::new();
        for (i, (neg, t)) in parts.into_iter().enumerate() {
            match (i, neg) {
                (0, true) => s.push('-'),
                (0, false) => {}
                (_, true) => s.push_str(" - "),
                (_, false) => s.push_str(" + "),
            }
            s.push_str(&t);
        }
        s
    }
}

/// Degree-`d` component of `r`.
pub fn graded_degree(r: &GradedRing, d: i64) -> Result<FgAbGroup> {
    Ok(r.degree_data(d)?.group.clone())
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt, usize),
    Ident(String, usize),
    Sym(char, usize),
}

fn tokenize(src: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Tok::Int(s.parse().expect("digits"), col));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect(), col));
        } else if "+-*^".contains(c) {
            out.push(Tok::Sym(c, col));
            i += 1;
        } else {
            return Err(Error::parse(1, col, format!("unexpected {c:?}")));
        }
    }
    if out.is_empty() {
        return Err(Error::parse(1, 1, "empty expression"));
    }
    Ok(out)
}

fn unexpected(t: Option<&Tok>, src: &str) -> Error {
    match t {
        Some(Tok::Int(n, c)) => Error::parse(1, *c, format!("unexpected {n}")),
        Some(Tok::Ident(s, c)) => Error::parse(1, *c, format!("unexpected {s:?}")),
        Some(Tok::Sym(s, c)) => Error::parse(1, *c, format!("unexpected {s:?}")),
        None => Error::parse(1, src.chars().count() + 1, "unexpected end of expression"),
    }
}

/// `ko^* = Z[eta, v, w] / (2 eta, eta^3, eta v, v^2 - 4 w)` with cohomological
/// degrees `|eta| = -1`, `|v| = -4`, `|w| = -8`.
pub fn ko() -> GradedRing {
    GradedRing::new(
        "ko^*",
        &KO_GENERATORS,
        &KO_RELATIONS,
    )
    .expect("static presentation")
}

const KO_GENERATORS: [(&str, i64); 3] = [("eta", -1), ("v", -4), ("w", -8)];
const KO_RELATIONS: [&str; 4] = ["2*eta", "eta^3", "eta*v", "v^2 - 4*w"];

/// `ko^*(S^4) = ko^*[z] / (z^2)` with `|z| = 4`.
pub fn ko_s4() -> GradedRing {
    let gens: Vec<(&str, i64)> = KO_GENERATORS.iter().copied().chain([("z", 4)]).collect();
    let rels: Vec<&str> = KO_RELATIONS.iter().copied().chain(["z^2"]).collect();
    GradedRing::new("ko^*(S^4)", &gens, &rels).expect("static presentation")
}

/// `ko^*(BSp(1))`, a power series ring over `ko^*` on `p1H` of degree 4. Only
/// its multiplicative structure is usable; degree components are unbounded.
pub fn ko_bsp1() -> GradedRing {
    let gens: Vec<(&str, i64)> = KO_GENERATORS.iter().copied().chain([("p1H", 4)]).collect();
    GradedRing::new("ko^*(BSp(1))", &gens, &KO_RELATIONS).expect("static presentation")
}

/// The ko-theoretic Euler class `eta * p` of a rank-3 spin bundle whose spinor
/// bundle has quaternionic Pontryagin class `p`.
#[derive(Clone, Debug, PartialEq)]
pub struct KoEuler {
    pub class: GradedElement,
    /// `None` when the degree-3 group of the ring is not computable.
    pub nonzero: Option<bool>,
    /// The ordinary integral Euler class of a rank-3 spin bundle is `W3 = 0`.
    pub ordinary_euler_zero: bool,
}

pub fn ko_euler_rank3(ring: &GradedRing, p1h_of_spinor: &GradedElement) -> Result<KoEuler> {
    if p1h_of_spinor.degree != 4 && !p1h_of_spinor.poly.is_zero() {
        return Err(Error::Contract(format!(
            "expected a degree-4 class, got degree {}",
            p1h_of_spinor.degree
        )));
    }
    let eta = ring.generator("eta")?;
    let class = ring.mul(&eta, &GradedElement { degree: 4, ..p1h_of_spinor.clone() });
    let nonzero = match ring.is_zero(&class) {
        Ok(z) => Some(!z),
        Err(Error::Unsupported(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(KoEuler {
        class,
        nonzero,
        ordinary_euler_zero: true,
    })
}

impl fmt::Display for GradedRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> FgAbGroup {
        s.parse().unwrap()
    }

    #[test]
    fn ko_coefficients() {
        let r = ko();
        let expected = ["Z", "Z/2", "Z/2", "0", "Z", "0", "0", "0", "Z"];
        for (i, e) in expected.iter().enumerate() {
            assert_eq!(graded_degree(&r, -(i as i64)).unwrap(), g(e), "degree -{i}");
        }
        assert!(graded_degree(&r, 3).unwrap().is_trivial());
        assert_eq!(graded_degree(&r, -9).unwrap(), g("Z/2"));
        assert_eq!(graded_degree(&r, -12).unwrap(), g("Z"));
    }

    #[test]
    fn ko_of_s4() {
        let r = ko_s4();
        assert_eq!(graded_degree(&r, 3).unwrap(), g("Z/2"));
        assert_eq!(graded_degree(&r, 4).unwrap(), g("Z"));
        assert_eq!(graded_degree(&r, 2).unwrap(), g("Z/2"));
        assert!(graded_degree(&r, 1).unwrap().is_trivial());
    }

    #[test]
    fn euler_class_on_s4() {
        let r = ko_s4();
        let z = r.generator("z").unwrap();
        let e = ko_euler_rank3(&r, &z).unwrap();
        assert_eq!(r.format_element(&e.class), "eta*z");
        assert_eq!(e.nonzero, Some(true));
        assert!(e.ordinary_euler_zero);

        let zero = ko_euler_rank3(&r, &GradedElement::zero(4)).unwrap();
        assert_eq!(zero.nonzero, Some(false));

        let eta = r.generator("eta").unwrap();
        assert!(matches!(ko_euler_rank3(&r, &eta), Err(Error::Contract(_))));
    }

    #[test]
    fn euler_class_universal() {
        let r = ko_bsp1();
        let p = r.generator("p1H").unwrap();
        let e = ko_euler_rank3(&r, &p).unwrap();
        assert_eq!(r.format_element(&e.class), "eta*p1H");
        assert_eq!(e.nonzero, None);
        assert!(matches!(graded_degree(&r, 3), Err(Error::Unsupported(_))));
    }

    #[test]
    fn zero_tests() {
        let r = ko();
        let two_eta = r.parse_element("2*eta").unwrap();
        assert!(r.is_zero(&two_eta).unwrap());
        assert!(!r.is_zero(&r.generator("eta").unwrap()).unwrap());
        let v2 = r.parse_element("v^2").unwrap();
        let w = r.parse_element("4*w").unwrap();
        assert!(r.is_zero(&r.add(&v2, &r.parse_element("-4*w").unwrap()).unwrap()).unwrap());
        assert!(!r.is_zero(&w).unwrap());
    }

    #[test]
    fn parse_errors() {
        let r = ko();
        assert!(r.parse_element("eta + v").is_err());
        assert!(r.parse_element("x").is_err());
        assert!(r.parse_element("eta^").is_err());
        assert!(r.parse_element("").is_err());
    }

    #[test]
    fn exponent_bound_enforced() {
        let r = ko().with_exponent_bound(2);
        assert!(graded_degree(&r, -8).is_ok());
        assert!(matches!(graded_degree(&r, -24), Err(Error::Unsupported(_))));
    }
}
