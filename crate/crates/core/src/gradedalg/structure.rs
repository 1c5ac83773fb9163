use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;

use super::bundle::{total_sw, Base, BundleExpr};
use crate::error::{Error, Result};

/// Truncation used for obstruction checks; `w_4` is the highest class consulted.
const OBSTRUCTION_DEGREE: u32 = 4;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum TangentialStructure {
    O,
    SO,
    Spinc,
    Spin,
    String,
}

/// One characteristic-class condition required for a lift.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Obstruction {
    /// `w_i = 0`.
    Sw(u32),
    /// `w_2` lifts to an integral class.
    IntegralW2,
}

impl fmt::Display for Obstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Obstruction::Sw(i) => write!(f, "w{i}"),
            Obstruction::IntegralW2 => write!(f, "W3"),
        }
    }
}

impl TangentialStructure {
    pub const ALL: [TangentialStructure; 5] = [
        TangentialStructure::O,
        TangentialStructure::SO,
        TangentialStructure::Spinc,
        TangentialStructure::Spin,
        TangentialStructure::String,
    ];

    pub fn rule(self) -> &'static [Obstruction] {
        use Obstruction::*;
        match self {
            TangentialStructure::O => &[],
            TangentialStructure::SO => &[Sw(1)],
            TangentialStructure::Spinc => &[Sw(1), IntegralW2],
            TangentialStructure::Spin => &[Sw(1), Sw(2)],
            TangentialStructure::String => &[Sw(1), Sw(2), Sw(4)],
        }
    }
}

impl fmt::Display for TangentialStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TangentialStructure::O => "O",
            TangentialStructure::SO => "SO",
            TangentialStructure::Spinc => "Spinc",
            TangentialStructure::Spin => "Spin",
            TangentialStructure::String => "String",
        };
        write!(f, "{s}")
    }
}

impl FromStr for TangentialStructure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '^', '_'], "").as_str() {
            "o" => Ok(TangentialStructure::O),
            "so" => Ok(TangentialStructure::SO),
            "spinc" => Ok(TangentialStructure::Spinc),
            "spin" => Ok(TangentialStructure::Spin),
            "string" => Ok(TangentialStructure::String),
            _ => Err(Error::Unsupported(format!(
                "tangential structure {s:?}; expected one of o, so, spinc, spin, string"
            ))),
        }
    }
}

/// Outcome of one obstruction class for a given bundle.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ObstructionCheck {
    pub obstruction: Obstruction,
    pub vanishes: bool,
}

/// Whether `w_2` of a bundle with `w_1 = 0` lifts integrally. On BZ/2, BU(1)
/// and BSU(2) reduction mod 2 is onto in degree 2; on BSO(3) the Bockstein of
/// the generator `w2` is `w3 != 0`, so only a vanishing `w_2` lifts.
fn w2_lifts(b: &BundleExpr) -> bool {
    match b.base() {
        Base::BZ2 | Base::BU1 | Base::BSU2 => true,
        Base::BSO3 => total_sw(b, OBSTRUCTION_DEGREE).component(2).is_zero(),
    }
}

/// Evaluates every condition of the structure's rule on `b`.
pub fn obstructions(s: TangentialStructure, b: &BundleExpr) -> Result<Vec<ObstructionCheck>> {
    if s == TangentialStructure::String && b.base() != Base::BZ2 {
        return Err(Error::Unsupported(format!(
            "string obstruction is only reduced to w4 over BZ2, not {}",
            b.base()
        )));
    }
    let w = total_sw(b, OBSTRUCTION_DEGREE);
    Ok(s.rule()
        .iter()
        .map(|&o| {
            let vanishes = match o {
                Obstruction::Sw(i) => w.component(i).is_zero(),
                Obstruction::IntegralW2 => w2_lifts(b),
            };
            ObstructionCheck {
                obstruction: o,
                vanishes,
            }
        })
        .collect())
}

pub fn lift_obstruction_vanishes(s: TangentialStructure, b: &BundleExpr) -> Result<bool> {
    Ok(obstructions(s, b)?.iter().all(|c| c.vanishes))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SmithPeriod {
    Exact(u64),
    /// No period at most the given bound.
    ExceedsBound(u64),
}

impl fmt::Display for SmithPeriod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SmithPeriod::Exact(k) => write!(f, "{k}"),
            SmithPeriod::ExceedsBound(b) => write!(f, "exceeds bound {b}"),
        }
    }
}

/// Per-multiple trace of a period search.
pub type PeriodTrace = Vec<(u64, Vec<ObstructionCheck>)>;

/// Smallest `k` in `1..=bound` such that `k * w` admits the structure, with the
/// obstruction trace of every multiple tried.
pub fn smith_period_traced(
    s: TangentialStructure,
    w: &BundleExpr,
    bound: u64,
) -> Result<(SmithPeriod, PeriodTrace)> {
    if !w.is_genuine() {
        return Err(Error::Contract(format!("period needs a genuine bundle, got {w}")));
    }
    if bound == 0 {
        return Err(Error::Contract("search bound must be at least 1".into()));
    }
    let mut trace = Vec::new();
    for k in 1..=bound {
        let checks = obstructions(s, &w.scale(k as i64))?;
        let ok = checks.iter().all(|c| c.vanishes);
        trace.push((k, checks));
        if ok {
            return Ok((SmithPeriod::Exact(k), trace));
        }
    }
    Ok((SmithPeriod::ExceedsBound(bound), trace))
}

pub fn smith_period(s: TangentialStructure, w: &BundleExpr, bound: u64) -> Result<SmithPeriod> {
    Ok(smith_period_traced(s, w, bound)?.0)
}

/// Number of `s` in `1..=k` with `s ≡ 0, 1, 2, 4 (mod 8)`.
pub fn adams_phi(k: u64) -> u64 {
    let full = k / 8;
    let rest = k % 8;
    let partial = [1, 2, 4].iter().filter(|&&r| r <= rest).count() as u64;
    4 * full + partial
}

/// `2^φ(k)`.
pub fn james_period(k: u64) -> BigUint {
    BigUint::from(1u32) << adams_phi(k)
}

/// Result of capping `x^k` with `p_1^H`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CapResult {
    /// The class `x^j`.
    Power(u64),
    /// The zero class (`x^{-1} = 0`).
    Zero,
}

pub fn cap_p1h(k: u64) -> CapResult {
    match k {
        0 => CapResult::Zero,
        k => CapResult::Power(k - 1),
    }
}
