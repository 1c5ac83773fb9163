//! Finite abelian groups through their p-primary partitions: embedding and
//! quotient tests, and the isomorphism types of extensions.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use super::group::FgAbGroup;
use crate::error::{Error, Result};

/// Prime factorization by trial division, primes ascending.
pub fn factorize(n: &BigInt) -> Vec<(BigInt, u32)> {
    let mut n = n.clone();
    let mut out = Vec::new();
    let mut p = BigInt::from(2);
    while &p * &p <= n {
        let mut e = 0;
        while n.is_multiple_of(&p) {
            n /= &p;
            e += 1;
        }
        if e > 0 {
            out.push((p.clone(), e));
        }
        p += 1;
    }
    if n > BigInt::one() {
        out.push((n, 1));
    }
    out
}

/// For each prime dividing the torsion, the partition (exponents, largest first)
/// of the p-primary part.
pub fn primary_partitions(g: &FgAbGroup) -> BTreeMap<BigInt, Vec<u32>> {
    let mut out: BTreeMap<BigInt, Vec<u32>> = BTreeMap::new();
    for d in g.invariant_factors() {
        for (p, e) in factorize(d) {
            out.entry(p).or_default().push(e);
        }
    }
    for parts in out.values_mut() {
        parts.sort_unstable_by(|a, b| b.cmp(a));
    }
    out
}

/// Rebuilds a finite group from its primary partitions.
pub fn from_partitions(parts: &BTreeMap<BigInt, Vec<u32>>) -> FgAbGroup {
    let orders = parts
        .iter()
        .flat_map(|(p, lam)| lam.iter().map(move |&e| num_traits::pow(p.clone(), e as usize)));
    FgAbGroup::from_orders(0, orders)
}

fn contained(mu: &[u32], lam: &[u32]) -> bool {
    mu.len() <= lam.len() && mu.iter().zip(lam).all(|(a, b)| a <= b)
}

fn require_finite(op: &str, groups: &[&FgAbGroup]) -> Result<()> {
    match groups.iter().find(|g| !g.is_finite()) {
        Some(g) => Err(Error::Unsupported(format!("{op} needs finite groups, got {g}"))),
        None => Ok(()),
    }
}

/// Whether an injective homomorphism `a -> b` exists.
pub fn embeds(a: &FgAbGroup, b: &FgAbGroup) -> Result<bool> {
    require_finite("embeds", &[a, b])?;
    let pa = primary_partitions(a);
    let pb = primary_partitions(b);
    Ok(pa.iter().all(|(p, mu)| contained(mu, pb.get(p).map_or(&[][..], |v| v))))
}

/// Whether `q` is isomorphic to a quotient of `g`. For finite groups this is
/// the same as `q` embedding in `g`.
pub fn is_quotient_of(q: &FgAbGroup, g: &FgAbGroup) -> Result<bool> {
    require_finite("is_quotient_of", &[q, g])?;
    embeds(q, g)
}

/// All partitions of `n` with parts in decreasing order.
pub fn partitions(n: u32) -> Vec<Vec<u32>> {
    fn go(n: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 0 {
            out.push(prefix.clone());
            return;
        }
        for part in (1..=n.min(max)).rev() {
            prefix.push(part);
            go(n - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// Littlewood–Richardson coefficient `c^lam_{mu, nu}`, by counting
/// semistandard fillings of `lam / mu` with content `nu` whose reverse
/// reading word is a lattice word.
pub fn lr_coefficient(lam: &[u32], mu: &[u32], nu: &[u32]) -> u64 {
    let sum = |v: &[u32]| v.iter().sum::<u32>();
    if sum(lam) != sum(mu) + sum(nu) || !contained(mu, lam) || !contained(nu, lam) {
        return 0;
    }
    let rows = lam.len();
    let mu_at = |i: usize| mu.get(i).copied().unwrap_or(0) as usize;
    // cells in reading order: rows top to bottom, each row right to left
    let cells: Vec<(usize, usize)> = (0..rows)
        .flat_map(|i| (mu_at(i)..lam[i] as usize).rev().map(move |j| (i, j)))
        .collect();
    let mut grid: Vec<Vec<usize>> = lam.iter().map(|&l| vec![0; l as usize]).collect();
    let mut counts = vec![0u32; nu.len()];

    fn fill(
        k: usize,
        cells: &[(usize, usize)],
        grid: &mut Vec<Vec<usize>>,
        counts: &mut Vec<u32>,
        nu: &[u32],
        mu_at: &dyn Fn(usize) -> usize,
    ) -> u64 {
        if k == cells.len() {
            return 1;
        }
        let (i, j) = cells[k];
        let mut total = 0;
        for v in 1..=nu.len() {
            if counts[v - 1] == nu[v - 1] {
                continue;
            }
            // lattice condition on the reading word so far
            if v > 1 && counts[v - 1] + 1 > counts[v - 2] {
                continue;
            }
            // rows weakly increase left to right; we fill right to left
            if j + 1 < grid[i].len() && grid[i][j + 1] < v {
                continue;
            }
            // columns strictly increase downwards
            if i > 0 && j >= mu_at(i - 1) && grid[i - 1][j] >= v {
                continue;
            }
            grid[i][j] = v;
            counts[v - 1] += 1;
            total += fill(k + 1, cells, grid, counts, nu, mu_at);
            counts[v - 1] -= 1;
            grid[i][j] = 0;
        }
        total
    }
    fill(0, &cells, &mut grid, &mut counts, nu, &mu_at)
}

/// Isomorphism types of groups `G` admitting `0 -> k -> G -> q -> 0`.
///
/// Supported when both are finite (p-primary Littlewood–Richardson test), when
/// `q` is free (the sequence splits), or when `k` is trivial.
pub fn extension_candidates(k: &FgAbGroup, q: &FgAbGroup) -> Result<BTreeSet<FgAbGroup>> {
    if k.is_trivial() {
        return Ok(BTreeSet::from([q.clone()]));
    }
    if q.is_torsion_free() {
        return Ok(BTreeSet::from([k.direct_sum(q)]));
    }
    require_finite("extension_candidates", &[k, q])?;

    let pk = primary_partitions(k);
    let pq = primary_partitions(q);
    let primes: BTreeSet<BigInt> = pk.keys().chain(pq.keys()).cloned().collect();
    let empty = Vec::new();
    let mut per_prime: Vec<(BigInt, Vec<Vec<u32>>)> = Vec::new();
    for p in primes {
        let mu = pk.get(&p).unwrap_or(&empty);
        let nu = pq.get(&p).unwrap_or(&empty);
        let n = mu.iter().sum::<u32>() + nu.iter().sum::<u32>();
        let options: Vec<Vec<u32>> = partitions(n)
            .into_iter()
            .filter(|lam| lr_coefficient(lam, mu, nu) > 0)
            .collect();
        per_prime.push((p, options));
    }

    let mut out = BTreeSet::new();
    let mut choice = vec![0usize; per_prime.len()];
    'outer: loop {
        let parts: BTreeMap<BigInt, Vec<u32>> = per_prime
            .iter()
            .zip(&choice)
            .map(|((p, opts), &c)| (p.clone(), opts[c].clone()))
            .collect();
        out.insert(from_partitions(&parts));
        for (slot, (_, opts)) in choice.iter_mut().zip(&per_prime) {
            *slot += 1;
            if *slot < opts.len() {
                continue 'outer;
            }
            *slot = 0;
        }
        break;
    }
    Ok(out)
}

/// Every abelian group of the given order, in canonical order.
pub fn groups_of_order(n: u64) -> Vec<FgAbGroup> {
    if n == 0 {
        return Vec::new();
    }
    let fac = factorize(&BigInt::from(n));
    let per_prime: Vec<(BigInt, Vec<Vec<u32>>)> =
        fac.into_iter().map(|(p, e)| (p, partitions(e))).collect();
    let mut out = BTreeSet::new();
    let mut choice = vec![0usize; per_prime.len()];
    'outer: loop {
        let parts: BTreeMap<BigInt, Vec<u32>> = per_prime
            .iter()
            .zip(&choice)
            .map(|((p, opts), &c)| (p.clone(), opts[c].clone()))
            .collect();
        out.insert(from_partitions(&parts));
        for (slot, (_, opts)) in choice.iter_mut().zip(&per_prime) {
            *slot += 1;
            if *slot < opts.len() {
                continue 'outer;
            }
            *slot = 0;
        }
        break;
    }
    out.into_iter().collect()
}

/// Number of elements of `g` of each order, as a sorted list. Two finite
/// abelian groups are isomorphic iff these agree.
pub fn order_statistics(g: &FgAbGroup) -> Result<Vec<(u64, u64)>> {
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for e in g.elements()? {
        let o = g.element_order(&e).expect("finite group");
        *counts.entry(o.to_u64().expect("bounded")).or_default() += 1;
    }
    Ok(counts.into_iter().collect())
}


#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> FgAbGroup {
        s.parse().unwrap()
    }

    fn set(items: &[&str]) -> BTreeSet<FgAbGroup> {
        items.iter().map(|s| g(s)).collect()
    }

    #[test]
    fn embedding_examples() {
        assert!(embeds(&g("Z/4"), &g("Z/8")).unwrap());
        assert!(!embeds(&g("Z/2+Z/2"), &g("Z/8")).unwrap());
        assert!(embeds(&g("0"), &g("Z/6")).unwrap());
        assert!(embeds(&g("Z/3"), &g("Z/6")).unwrap());
        assert!(matches!(embeds(&g("Z"), &g("Z/2")), Err(Error::Unsupported(_))));
    }

    #[test]
    fn lr_small_cases() {
        // s_1 * s_1 = s_2 + s_11
        assert_eq!(lr_coefficient(&[2], &[1], &[1]), 1);
        assert_eq!(lr_coefficient(&[1, 1], &[1], &[1]), 1);
        // s_21 * s_21 contains s_321 with multiplicity 2
        assert_eq!(lr_coefficient(&[3, 2, 1], &[2, 1], &[2, 1]), 2);
        assert_eq!(lr_coefficient(&[1, 1, 1], &[2], &[1]), 0);
    }

    #[test]
    fn extension_examples() {
        assert_eq!(extension_candidates(&g("Z/2"), &g("Z/2")).unwrap(), set(&["Z/4", "Z/2+Z/2"]));
        assert_eq!(extension_candidates(&g("Z/2"), &g("0")).unwrap(), set(&["Z/2"]));
        assert_eq!(extension_candidates(&g("Z/4"), &g("Z/2")).unwrap(), set(&["Z/8", "Z/2+Z/4"]));
        assert_eq!(extension_candidates(&g("Z/2"), &g("Z/3")).unwrap(), set(&["Z/6"]));
        assert_eq!(extension_candidates(&g("Z/2"), &g("Z")).unwrap(), set(&["Z+Z/2"]));
        assert_eq!(extension_candidates(&g("0"), &g("Z+Z/2")).unwrap(), set(&["Z+Z/2"]));
        assert!(extension_candidates(&g("Z"), &g("Z/2")).is_err());
    }

    #[test]
    fn group_counts() {
        assert_eq!(groups_of_order(8).len(), 3);
        assert_eq!(groups_of_order(16).len(), 5);
        assert_eq!(groups_of_order(36).len(), 4);
        assert_eq!(groups_of_order(1), vec![FgAbGroup::trivial()]);
    }

    #[test]
    fn factorization() {
        assert_eq!(
            factorize(&BigInt::from(360)),
            vec![(BigInt::from(2), 3), (BigInt::from(3), 2), (BigInt::from(5), 1)]
        );


    }
}
