//! Enumeration of homomorphisms between small groups, and their classes
//! under automorphisms of domain and codomain.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::sequence::EdgeFlags;
use crate::error::{Error, Result};
use crate::fgab::{FgAbGroup, GroupHom, IntMatrix};

pub const DEFAULT_WINDOW: i64 = 64;
const MAX_TORSION: u64 = 1 << 16;
const MAX_RANK: usize = 2;
const MAX_MAPS: u128 = 1 << 20;

#[derive(Clone, Debug)]
pub struct EnumerateOptions {
    /// Free-part matrix entries range over `-window..=window`.
    pub window: i64,
    /// Keep one representative per orbit of `Aut(codomain)`.
    pub dedup_codomain: bool,
    pub max_maps: u128,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        EnumerateOptions {
            window: DEFAULT_WINDOW,
            dedup_codomain: false,
            max_maps: MAX_MAPS,
        }
    }
}

/// Whether enumeration lists every homomorphism (no free-to-free entries).
pub fn enumeration_is_complete(a: &FgAbGroup, b: &FgAbGroup) -> bool {
    a.is_finite() || b.is_finite()
}

/// Possible values of one matrix entry: the image coordinate of generator `j`
/// (order `d`, 0 if free) along codomain generator `k` (order `e`, 0 if free).
fn entry_values(d: &BigInt, e: &BigInt, window: i64) -> Vec<BigInt> {
    match (d.is_zero(), e.is_zero()) {
        (true, true) => (-window..=window).map(BigInt::from).collect(),
        (false, true) => vec![BigInt::zero()],
        (true, false) => num_iter(e),
        (false, false) => {
            let g = d.gcd(e);
            let step = e / &g;
            (0..g.to_u64().expect("bounded"))
                .map(|t| &step * BigInt::from(t))
                .collect()
        }
    }
}

fn num_iter(e: &BigInt) -> Vec<BigInt> {
    (0..e.to_u64().expect("bounded")).map(BigInt::from).collect()
}

fn check_size(a: &FgAbGroup, b: &FgAbGroup) -> Result<()> {
    for g in [a, b] {
        if g.free_rank() > MAX_RANK || g.torsion_order() > BigInt::from(MAX_TORSION) {
            return Err(Error::Unsupported(format!(
                "map enumeration needs rank <= {MAX_RANK} and torsion <= {MAX_TORSION}, got {g}"
            )));
        }
    }
    Ok(())
}

/// Number of matrices `enumerate_maps` would visit.
pub fn hom_count(a: &FgAbGroup, b: &FgAbGroup, window: i64) -> Result<u128> {
    check_size(a, b)?;
    let mut total: u128 = 1;
    for d in a.generator_orders() {
        for e in b.generator_orders() {
            total = total.saturating_mul(entry_values(&d, &e, window).len() as u128);
        }
    }
    Ok(total)
}

/// All homomorphisms `a -> b` with the given properties, in a fixed order.
pub fn enumerate_maps(
    a: &FgAbGroup,
    b: &FgAbGroup,
    flags: &EdgeFlags,
    opts: &EnumerateOptions,
) -> Result<Vec<GroupHom>> {
    let total = hom_count(a, b, opts.window)?;
    if total > opts.max_maps {
        return Err(Error::Unsupported(format!(
            "{total} candidate maps {a} -> {b} exceed the limit {}",
            opts.max_maps
        )));
    }
    let rows = b.num_generators();
    let cols = a.num_generators();
    let choices: Vec<Vec<BigInt>> = (0..rows * cols)
        .map(|idx| {
            let (i, j) = (idx / cols, idx % cols);
            entry_values(&a.generator_orders()[j], &b.generator_orders()[i], opts.window)
        })
        .collect();

    let mut out = Vec::new();
    let mut pick = vec![0usize; choices.len()];
    loop {
        let mut m = IntMatrix::zeros(rows, cols);
        for (idx, &c) in pick.iter().enumerate() {
            m[(idx / cols, idx % cols)] = choices[idx][c].clone();
        }
        let f = GroupHom::new(a.clone(), b.clone(), m).expect("entries respect the relations");
        if flags.admits(&f) {
            out.push(f);
        }
        // odometer, last entry fastest
        let mut k = choices.len();
        loop {
            if k == 0 {
                return Ok(if opts.dedup_codomain {
                    dedup_by_codomain(out)
                } else {
                    out
                });
            }
            k -= 1;
            pick[k] += 1;
            if pick[k] < choices[k].len() {
                break;
            }
            pick[k] = 0;
        }
    }
}

fn dedup_by_codomain(maps: Vec<GroupHom>) -> Vec<GroupHom> {
    let Some(first) = maps.first() else {
        return maps;
    };
    let gens = automorphism_generators(first.codomain());
    let classes = orbit_partition(&maps, &[], &gens);
    classes.into_iter().map(|c| maps[c[0]].clone()).collect()
}

/// A generating set of `Aut(g)` built from elementary moves on the standard
/// generators: permutations and sign changes of free generators, free
/// transvections, free-to-torsion shears, unit scalings and admissible
/// transvections between torsion generators.
pub fn automorphism_generators(g: &FgAbGroup) -> Vec<GroupHom> {
    let n = g.num_generators();
    let r = g.free_rank();
    let orders = g.generator_orders();
    let mut mats: Vec<IntMatrix> = Vec::new();
    let elementary = |i: usize, j: usize, c: BigInt| {
        // generator j maps to e_j + c e_i
        let mut m = IntMatrix::identity(n);
        m[(i, j)] += c;
        m
    };

    for i in 0..r {
        let mut neg = IntMatrix::identity(n);
        neg[(i, i)] = BigInt::from(-1);
        mats.push(neg);
        for j in 0..r {
            if i != j {
                mats.push(elementary(i, j, BigInt::one()));
            }
        }
        for k in r..n {
            mats.push(elementary(k, i, BigInt::one()));
        }
    }
    for k in r..n {
        let d = &orders[k];
        let du = d.to_u64().unwrap_or(u64::MAX);
        // primes below d not dividing d, together with -1, generate the units mod d
        let mut units: Vec<u64> = vec![du.saturating_sub(1)];
        let mut p = 2u64;
        while p < du {
            if is_prime(p) && !du.is_multiple_of(p) {
                units.push(p);
            }
            p += 1;
        }
        for u in units {
            if u <= 1 {
                continue;
            }
            let mut m = IntMatrix::identity(n);
            m[(k, k)] = BigInt::from(u);
            mats.push(m);
        }
        for l in r..n {
            if k == l {
                continue;
            }
            // t_k -> t_k + c t_l needs c * d_k = 0 mod d_l
            let c = &orders[l] / d.gcd(&orders[l]);
            mats.push(elementary(l, k, c));
            if orders[l] == *d {
                let mut sw = IntMatrix::identity(n);
                sw[(k, k)] = BigInt::zero();
                sw[(l, l)] = BigInt::zero();
                sw[(k, l)] = BigInt::one();
                sw[(l, k)] = BigInt::one();
                mats.push(sw);
            }
        }
    }
    mats.into_iter()
        .map(|m| GroupHom::new(g.clone(), g.clone(), m).expect("elementary automorphism"))
        .collect()
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|q| q * q <= p).all(|q| !p.is_multiple_of(q))
}

/// Partitions `maps` into orbits of `f -> beta . f . alpha` where `alpha` ranges
/// over the group generated by `domain_gens` and `beta` over that of
/// `codomain_gens`. Maps leaving the list are ignored, so the list should be
/// closed under the action. Classes come in order of first member.
pub fn orbit_partition(
    maps: &[GroupHom],
    domain_gens: &[GroupHom],
    codomain_gens: &[GroupHom],
) -> Vec<Vec<usize>> {
    let index: HashMap<&GroupHom, usize> = maps.iter().enumerate().map(|(i, f)| (f, i)).collect();
    let mut parent: Vec<usize> = (0..maps.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    for (i, f) in maps.iter().enumerate() {
        let moved = domain_gens
            .iter()
            .filter_map(|a| f.compose(a).ok())
            .chain(codomain_gens.iter().filter_map(|b| b.compose(f).ok()));
        for g in moved {
            if let Some(&j) = index.get(&g) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut slot: HashMap<usize, usize> = HashMap::new();
    for i in 0..maps.len() {
        let r = find(&mut parent, i);
        let c = *slot.entry(r).or_insert_with(|| {
            classes.push(Vec::new());
            classes.len() - 1
        });
        classes[c].push(i);
    }
    classes
}

/// Orbits of `maps` under `Aut(domain) x Aut(codomain)`.
pub fn map_classes(maps: &[GroupHom]) -> Vec<Vec<usize>> {
    let Some(first) = maps.first() else {
        return Vec::new();
    };
    orbit_partition(
        maps,
        &automorphism_generators(first.domain()),
        &automorphism_generators(first.codomain()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> FgAbGroup {
        s.parse().unwrap()
    }

    fn all(a: &str, b: &str, flags: EdgeFlags) -> Vec<GroupHom> {
        enumerate_maps(&g(a), &g(b), &flags, &EnumerateOptions::default()).unwrap()
    }

    #[test]
    fn hom_z2_z4() {
        let maps = all("Z/2", "Z/4", EdgeFlags::default());
        assert_eq!(maps.len(), 2);
        assert!(maps.iter().any(|f| f.is_zero()));
        assert!(maps.iter().any(|f| f.matrix()[(0, 0)] == BigInt::from(2)));
    }

    #[test]
    fn no_surjection_z4_z8() {
        let flags = EdgeFlags {
            surjective: Some(true),
            ..Default::default()
        };
        assert!(all("Z/4", "Z/8", flags).is_empty());
    }

    #[test]
    fn defect_map_class() {
        let flags = EdgeFlags {
            surjective: Some(true),
            kernel: Some(g("Z")),
            ..Default::default()
        };
        let maps = all("Z+Z/8", "Z/16", flags);
        assert_eq!(maps.len(), 32);
        let target = GroupHom::from_rows(g("Z+Z/8"), g("Z/16"), &[vec![-1, 2]]).unwrap();
        assert!(maps.contains(&target));
        assert_eq!(map_classes(&maps).len(), 1);
    }

    #[test]
    fn window_bounds_free_entries() {
        let opts = EnumerateOptions {
            window: 3,
            ..Default::default()
        };
        let maps = enumerate_maps(&g("Z"), &g("Z"), &EdgeFlags::default(), &opts).unwrap();
        assert_eq!(maps.len(), 7);
        assert!(!enumeration_is_complete(&g("Z"), &g("Z")));
    }

    #[test]
    fn size_limits() {
        assert!(matches!(
            enumerate_maps(&g("Z+Z+Z"), &g("Z/2"), &EdgeFlags::default(), &EnumerateOptions::default()),
            Err(Error::Unsupported(_))
        ));
        assert!(enumerate_maps(&g("Z/65537"), &g("Z/2"), &EdgeFlags::default(), &EnumerateOptions::default()).is_err());
    }

    #[test]
    fn codomain_dedup() {
        let opts = EnumerateOptions {
            dedup_codomain: true,
            ..Default::default()
        };
        // Hom(Z/2, Z/2+Z/2) has 4 maps: zero and three injections, one Aut orbit
        let maps = enumerate_maps(&g("Z/2"), &g("Z/2+Z/2"), &EdgeFlags::default(), &opts).unwrap();
        assert_eq!(maps.len(), 2);
    }
}
