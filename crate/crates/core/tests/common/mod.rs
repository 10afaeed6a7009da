//! Reference implementations written straight from the metric definitions,
//! sharing no code with the library. Quadratic or worse; small inputs only.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use commeval::Partition;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Community label of each node in `nodes`, then of `padding` nodes that
/// appear in neither partition. Uncovered nodes get labels of their own.
pub fn labels(p: &Partition, nodes: &[u64], padding: usize) -> Vec<i64> {
    let mut of: BTreeMap<u64, i64> = BTreeMap::new();
    for (c, members) in p.communities().enumerate() {
        for &u in members {
            of.insert(u, c as i64);
        }
    }
    (0..nodes.len() + padding)
        .map(|i| match nodes.get(i).and_then(|u| of.get(u)) {
            Some(&c) => c,
            None => -1 - i as i64,
        })
        .collect()
}

/// (a11, a10, a01, a00) by visiting every unordered node pair.
pub fn pair_counts(c: &[i64], d: &[i64]) -> (u64, u64, u64, u64) {
    let mut out = (0, 0, 0, 0);
    for i in 0..c.len() {
        for j in i + 1..c.len() {
            match (c[i] == c[j], d[i] == d[j]) {
                (true, true) => out.0 += 1,
                (true, false) => out.1 += 1,
                (false, true) => out.2 += 1,
                (false, false) => out.3 += 1,
            }
        }
    }
    out
}

pub struct Comparison {
    pub vi: f64,
    pub nmi: f64,
    pub f: f64,
    pub nvd: f64,
    pub counts: (u64, u64, u64, u64),
    pub ri: f64,
    pub ari: f64,
    pub ji: f64,
}

fn sets(p: &Partition) -> Vec<BTreeSet<u64>> {
    p.communities().map(|c| c.iter().copied().collect()).collect()
}

/// Every comparison metric for two partitions over a universe of `n` nodes.
pub fn compare(c: &Partition, d: &Partition, n: usize) -> Comparison {
    let (cs, ds) = (sets(c), sets(d));
    let nf = n as f64;
    let inter = |x: &BTreeSet<u64>, y: &BTreeSet<u64>| x.intersection(y).count() as f64;

    // Entropies and mutual information over the joint distribution.
    let h = |s: &[BTreeSet<u64>]| -> f64 { s.iter().map(|x| x.len() as f64 / nf).map(|p| -p * p.ln()).sum() };
    let (hc, hd) = (h(&cs), h(&ds));
    let mut mi = 0.0;
    let mut h_joint = 0.0;
    let mut vi_cells = 0.0;
    for x in &cs {
        for y in &ds {
            let k = inter(x, y);
            if k > 0.0 {
                let pxy = k / nf;
                let (px, py) = (x.len() as f64 / nf, y.len() as f64 / nf);
                mi += pxy * (pxy / (px * py)).ln();
                h_joint -= pxy * pxy.ln();
                vi_cells -= k * (k * k / (x.len() * y.len()) as f64).ln() / nf;
            }
        }
    }
    // With full coverage VI is 2H(C,C') - H(C) - H(C'). When nodes are left
    // out the marginals no longer sum to one and only the per-cell sum holds.
    let covered = |s: &[BTreeSet<u64>]| s.iter().map(|x| x.len()).sum::<usize>();
    let vi = if covered(&cs) == n && covered(&ds) == n {
        2.0 * h_joint - hc - hd
    } else {
        vi_cells
    };
    let nmi = if hc + hd == 0.0 { 1.0 } else { 2.0 * mi / (hc + hd) };

    let mut f = 0.0;
    for x in &cs {
        let best = ds
            .iter()
            .map(|y| 2.0 * inter(x, y) / (x.len() + y.len()) as f64)
            .fold(0.0, f64::max);
        f += x.len() as f64 / nf * best;
    }
    let best_sum = |a: &[BTreeSet<u64>], b: &[BTreeSet<u64>]| -> f64 {
        a.iter()
            .map(|x| b.iter().map(|y| inter(x, y)).fold(0.0, f64::max))
            .sum()
    };
    let nvd = 1.0 - (best_sum(&cs, &ds) + best_sum(&ds, &cs)) / (2.0 * nf);

    let nodes: Vec<u64> = cs
        .iter()
        .chain(&ds)
        .flatten()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let padding = n - nodes.len();
    let counts = pair_counts(&labels(c, &nodes, padding), &labels(d, &nodes, padding));
    let (a11, a10, a01, a00) = counts;
    let m = (a11 + a10 + a01 + a00) as f64;
    let ri = (a11 + a00) as f64 / m;
    let (s1, s2) = ((a11 + a10) as f64, (a11 + a01) as f64);
    let expected = s1 * s2 / m;
    let ari_den = 0.5 * (s1 + s2) - expected;
    let ari = if ari_den == 0.0 {
        1.0
    } else {
        (a11 as f64 - expected) / ari_den
    };
    let ji_den = a11 + a10 + a01;
    let ji = if ji_den == 0 { 1.0 } else { a11 as f64 / ji_den as f64 };
    Comparison {
        vi,
        nmi,
        f,
        nvd,
        counts,
        ri,
        ari,
        ji,
    }
}

/// Modularity from the adjacency-matrix form Σ (A_ij − k_i k_j / 2m) δ(c_i, c_j) / 2m.
pub fn modularity(n: usize, edges: &[(usize, usize)], community: &[i64]) -> f64 {
    let mut a = vec![vec![0.0; n]; n];
    let mut k = vec![0.0; n];
    for &(u, v) in edges {
        a[u][v] = 1.0;
        a[v][u] = 1.0;
        k[u] += 1.0;
        k[v] += 1.0;
    }
    let two_m = 2.0 * edges.len() as f64;
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if community[i] == community[j] && community[i] >= 0 {
                q += a[i][j] - k[i] * k[j] / two_m;
            }
        }
    }
    q / two_m
}

/// Modularity density with the split penalty summed over every other
/// community (pairs without edges contribute zero).
pub fn modularity_density(edges: &[(usize, usize)], community: &[i64]) -> f64 {
    let m = edges.len() as f64;
    let mut size: BTreeMap<i64, f64> = BTreeMap::new();
    for &c in community.iter().filter(|&&c| c >= 0) {
        *size.entry(c).or_default() += 1.0;
    }
    let mut inside: BTreeMap<i64, f64> = BTreeMap::new();
    let mut boundary: BTreeMap<i64, f64> = BTreeMap::new();
    let mut between: BTreeMap<(i64, i64), f64> = BTreeMap::new();
    for &(u, v) in edges {
        let (cu, cv) = (community[u], community[v]);
        if cu == cv && cu >= 0 {
            *inside.entry(cu).or_default() += 1.0;
            continue;
        }
        for (a, b) in [(cu, cv), (cv, cu)] {
            if a >= 0 {
                *boundary.entry(a).or_default() += 1.0;
                if b >= 0 {
                    *between.entry((a, b)).or_default() += 1.0;
                }
            }
        }
    }
    let mut qds = 0.0;
    for (&c, &sc) in &size {
        let ein = inside.get(&c).copied().unwrap_or(0.0);
        let eout = boundary.get(&c).copied().unwrap_or(0.0);
        let dc = if sc > 1.0 { 2.0 * ein / (sc * (sc - 1.0)) } else { 0.0 };
        let share = (2.0 * ein + eout) / (2.0 * m) * dc;
        let mut penalty = 0.0;
        for (&other, &so) in &size {
            if other != c {
                let e = between.get(&(c, other)).copied().unwrap_or(0.0);
                penalty += e / (2.0 * m) * (e / (sc * so));
            }
        }
        qds += ein / m * dc - share * share - penalty;
    }
    qds
}

/// A random partition of `0..n` into at most `max_communities` labels.
pub fn random_partition(rng: &mut ChaCha8Rng, n: usize, max_communities: usize) -> Partition {
    let k = rng.gen_range(1..=max_communities);
    let mut groups = vec![Vec::new(); k];
    for u in 0..n as u64 {
        groups[rng.gen_range(0..k)].push(u);
    }
    groups.retain(|g| !g.is_empty());
    Partition::new(groups, n).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

pub fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    a == b || (a - b).abs() <= rel * a.abs().max(b.abs())
}
