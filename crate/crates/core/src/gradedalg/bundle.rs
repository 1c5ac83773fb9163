use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::f2poly::F2Poly;
use crate::error::{Error, Result};

/// Classifying spaces whose mod-2 cohomology is built in.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Base {
    /// `H^*(BZ/2) = F2[a]`, tautological line `sigma`.
    BZ2,
    /// `H^*(BU(1)) = F2[c]`, tautological complex line `L` (real rank 2).
    BU1,
    /// `H^*(BSO(3)) = F2[w2, w3]`, tautological bundle `V3`.
    BSO3,
    /// `H^*(BSU(2)) = F2[c2]`, tautological quaternionic line `H` (real rank 4).
    BSU2,
}

pub struct GeneratorBundle {
    pub name: &'static str,
    pub rank: u32,
}

impl Base {
    pub const ALL: [Base; 4] = [Base::BZ2, Base::BU1, Base::BSO3, Base::BSU2];

    pub fn cohomology_generators(self) -> &'static [(&'static str, u32)] {
        match self {
            Base::BZ2 => &[("a", 1)],
            Base::BU1 => &[("c", 2)],
            Base::BSO3 => &[("w2", 2), ("w3", 3)],
            Base::BSU2 => &[("c2", 4)],
        }
    }

    pub fn generator(self) -> GeneratorBundle {
        match self {
            Base::BZ2 => GeneratorBundle { name: "sigma", rank: 1 },
            Base::BU1 => GeneratorBundle { name: "L", rank: 2 },
            Base::BSO3 => GeneratorBundle { name: "V3", rank: 3 },
            Base::BSU2 => GeneratorBundle { name: "H", rank: 4 },
        }
    }

    fn aliases(self) -> &'static [&'static str] {
        match self {
            Base::BSO3 => &["V"],
            _ => &[],
        }
    }

    /// Total Stiefel–Whitney class of the generating bundle.
    pub fn generator_sw(self, truncation: Option<u32>) -> F2Poly {
        let gens = self.cohomology_generators();
        let mut w = F2Poly::one(gens, truncation);
        for (name, _) in gens {
            w = &w + &F2Poly::generator(gens, truncation, name).expect("listed generator");
        }
        w
    }
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Base::BZ2 => "BZ2",
            Base::BU1 => "BU1",
            Base::BSO3 => "BSO3",
            Base::BSU2 => "BSU2",
        };
        write!(f, "{s}")
    }
}

impl FromStr for Base {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| !matches!(c, '(' | ')' | '/' | ' '))
            .collect::<String>()
            .to_ascii_uppercase();
        match key.as_str() {
            "BZ2" => Ok(Base::BZ2),
            "BU1" => Ok(Base::BU1),
            "BSO3" => Ok(Base::BSO3),
            "BSU2" | "BSP1" => Ok(Base::BSU2),
            _ => Err(Error::Unsupported(format!(
                "base {s:?}; supported bases are BZ2, BU1, BSO3, BSU2"
            ))),
        }
    }
}

/// A virtual bundle `n + k * E` over a supported base, where `E` is the base's
/// generating bundle and `n` a trivial summand.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BundleExpr {
    base: Base,
    trivial: i64,
    multiple: i64,
}

impl BundleExpr {
    pub fn new(base: Base, trivial: i64, multiple: i64) -> Self {
        BundleExpr {
            base,
            trivial,
            multiple,
        }
    }

    /// `k` copies of the generating bundle.
    pub fn multiple_of_generator(base: Base, k: i64) -> Self {
        Self::new(base, 0, k)
    }

    pub fn base(&self) -> Base {
        self.base
    }

    pub fn trivial_part(&self) -> i64 {
        self.trivial
    }

    pub fn generator_coefficient(&self) -> i64 {
        self.multiple
    }

    pub fn rank(&self) -> i64 {
        self.trivial + self.multiple * self.base.generator().rank as i64
    }

    /// Non-virtual: no negative coefficients.
    pub fn is_genuine(&self) -> bool {
        self.trivial >= 0 && self.multiple >= 0
    }

    pub fn scale(&self, k: i64) -> Self {
        Self::new(self.base, self.trivial * k, self.multiple * k)
    }

    pub fn neg(&self) -> Self {
        self.scale(-1)
    }

    /// Whitney sum. Panics on mismatched bases.
    pub fn sum(&self, other: &BundleExpr) -> Self {
        assert_eq!(self.base, other.base, "bundles over different bases");
        Self::new(
            self.base,
            self.trivial + other.trivial,
            self.multiple + other.multiple,
        )
    }

    /// Parses `bundle := signed_term (("+"|"-") term)*`, where
    /// `term := [posint "*"] ident | posint` and a bare integer is a trivial bundle.
    pub fn parse(base: Base, src: &str) -> Result<Self> {
        let chars: Vec<char> = src.chars().collect();
        let mut pos = 0usize;
        let skip = |pos: &mut usize| {
            while *pos < chars.len() && chars[*pos].is_whitespace() {
                *pos += 1;
            }
        };
        let err = |pos: usize, msg: String| Error::parse(1, pos + 1, msg);

        let gen = base.generator();
        let mut coeffs: BTreeMap<bool, i64> = BTreeMap::new();
        let mut sign = 1i64;
        skip(&mut pos);
        if chars.get(pos) == Some(&'-') {
            sign = -1;
            pos += 1;
        }
        loop {
            skip(&mut pos);
            let start = pos;
            let mut num: Option<i64> = None;
            if chars.get(pos).is_some_and(|c| c.is_ascii_digit()) {
                let mut n = 0i64;
                while let Some(c) = chars.get(pos).filter(|c| c.is_ascii_digit()) {
                    n = n
                        .checked_mul(10)
                        .and_then(|n| n.checked_add(c.to_digit(10).unwrap() as i64))
                        .ok_or_else(|| err(start, "coefficient too large".into()))?;
                    pos += 1;
                }
                num = Some(n);
                skip(&mut pos);
            }
            let is_trivial = match (num, chars.get(pos)) {
                (Some(_), Some('*')) => {
                    pos += 1;
                    skip(&mut pos);
                    false
                }
                (Some(_), _) => true,
                (None, _) => false,
            };
            if !is_trivial {
                let id_start = pos;
                while chars
                    .get(pos)
                    .is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_')
                {
                    pos += 1;
                }
                if id_start == pos || chars[id_start].is_ascii_digit() {
                    return Err(err(id_start, "expected a bundle name".into()));
                }
                let ident: String = chars[id_start..pos].iter().collect();
                if ident != gen.name && !base.aliases().contains(&ident.as_str()) {
                    return Err(err(
                        id_start,
                        format!("unknown bundle {ident:?} over {base}; expected {}", gen.name),
                    ));
                }
            }
            let k = num.unwrap_or(1);
            *coeffs.entry(is_trivial).or_default() += sign * k;
            skip(&mut pos);
            match chars.get(pos) {
                None => break,
                Some('+') => sign = 1,
                Some('-') => sign = -1,
                Some(c) => return Err(err(pos, format!("unexpected {c:?}"))),
            }
            pos += 1;
        }
        Ok(BundleExpr::new(
            base,
            coeffs.get(&true).copied().unwrap_or(0),
            coeffs.get(&false).copied().unwrap_or(0),
        ))
    }
}

impl fmt::Display for BundleExpr {
    /// Prints in the parser's grammar: generator term first, then the trivial summand.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self.base.generator().name;
        let mut wrote = false;
        if self.multiple != 0 {
            let k = self.multiple;
            if k < 0 {
                write!(f, "-")?;
            }
            if k.abs() != 1 {
                write!(f, "{}*", k.abs())?;
            }
            write!(f, "{name}")?;
            wrote = true;
        }
        if self.trivial != 0 {
            let n = self.trivial;
            match (wrote, n < 0) {
                (_, true) => write!(f, "-{}", n.abs())?,
                (true, false) => write!(f, "+{n}")?,
                (false, false) => write!(f, "{n}")?,
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Total Stiefel–Whitney class, truncated above degree `truncation`.
pub fn total_sw(b: &BundleExpr, truncation: u32) -> F2Poly {
    let w = b.base.generator_sw(Some(truncation));
    let k = b.multiple;
    let factor = if k >= 0 {
        w
    } else {
        w.inverse().expect("constant term is 1")
    };
    factor.pow(k.unsigned_abs() as u32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sw_examples() {
        let four = BundleExpr::multiple_of_generator(Base::BZ2, 4);
        assert_eq!(total_sw(&four, 8).to_string(), "1 + a^4");
        let one = BundleExpr::parse(Base::BZ2, "sigma").unwrap();
        assert_eq!(total_sw(&one, 8).to_string(), "1 + a");
        let two_l = BundleExpr::parse(Base::BU1, "2*L").unwrap();
        assert_eq!(total_sw(&two_l, 8).to_string(), "1 + c^2");
        let v = BundleExpr::parse(Base::BSO3, "V").unwrap();
        assert_eq!(total_sw(&v, 4).to_string(), "1 + w2 + w3");
        assert_eq!(total_sw(&v.scale(2), 4).to_string(), "1 + w2^2");
    }

    #[test]
    fn virtual_bundle() {
        let b = BundleExpr::parse(Base::BZ2, "1 - sigma").unwrap();
        assert_eq!(b.rank(), 0);
        assert!(!b.is_genuine());
        assert_eq!(total_sw(&b, 3).to_string(), "1 + a + a^2 + a^3");
    }

    #[test]
    fn parse_and_print() {
        for (src, printed) in [
            ("3*sigma", "3*sigma"),
            ("sigma + sigma", "2*sigma"),
            ("-sigma+2", "-sigma+2"),
            ("2 - 2*sigma", "-2*sigma+2"),
            ("0", "0"),
            ("sigma - sigma", "0"),
        ] {
            let b = BundleExpr::parse(Base::BZ2, src).unwrap();
            assert_eq!(b.to_string(), printed, "{src}");
            assert_eq!(BundleExpr::parse(Base::BZ2, printed).unwrap(), b);
        }
        assert!(BundleExpr::parse(Base::BZ2, "L").is_err());
        assert!(BundleExpr::parse(Base::BZ2, "3*").is_err());
        assert!(BundleExpr::parse(Base::BZ2, "sigma +").is_err());
        assert_eq!(BundleExpr::parse(Base::BSO3, "V3").unwrap().rank(), 3);
    }

    #[test]
    fn base_names() {
        assert_eq!("BZ/2".parse::<Base>().unwrap(), Base::BZ2);
        assert_eq!("BU(1)".parse::<Base>().unwrap(), Base::BU1);
        assert!("BSpin".parse::<Base>().is_err());
    }
}
