//! F-measure and normalized van Dongen distance.
//!
//! Both reduce to per-community best-overlap maxima, which can be updated
//! shard by shard in any order.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::metrics::contingency::ContingencyTable;
use crate::partition::{Community, Partition};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchingMetrics {
    pub f_measure: f64,
    pub nvd: f64,
}

/// Best overlaps seen so far, indexed by global community id.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchMaxima {
    /// Per ground-truth community: max of 2|c∩c'| / (|c|+|c'|).
    pub max_normed: Vec<f64>,
    /// Per ground-truth community: max |c∩c'|.
    pub max_ground: Vec<u64>,
    /// Per detected community: max |c'∩c|.
    pub max_detected: Vec<u64>,
}

/// Which side of the maxima an update should touch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchSide {
    Ground,
    Detected,
    Both,
}

impl MatchMaxima {
    pub fn new(ground_count: usize, detected_count: usize) -> Self {
        MatchMaxima {
            max_normed: vec![0.0; ground_count],
            max_ground: vec![0; ground_count],
            max_detected: vec![0; detected_count],
        }
    }

    pub fn observe(&mut self, ground: &Community, detected: &Community, overlap: u64, side: MatchSide) {
        if side != MatchSide::Detected {
            let g = ground.id as usize;
            let normed = 2.0 * overlap as f64 / (ground.size() + detected.size()) as f64;
            self.max_normed[g] = self.max_normed[g].max(normed);
            self.max_ground[g] = self.max_ground[g].max(overlap);
        }
        if side != MatchSide::Ground {
            let d = detected.id as usize;
            self.max_detected[d] = self.max_detected[d].max(overlap);
        }
    }

    /// Element-wise max with another set of maxima over the same partitions.
    pub fn merge(&mut self, other: &MatchMaxima) {
        for (a, b) in self.max_normed.iter_mut().zip(&other.max_normed) {
            *a = a.max(*b);
        }
        for (a, b) in self.max_ground.iter_mut().zip(&other.max_ground) {
            *a = (*a).max(*b);
        }
        for (a, b) in self.max_detected.iter_mut().zip(&other.max_detected) {
            *a = (*a).max(*b);
        }
    }

    /// Scans every overlap between the two sets of communities.
    pub fn update(&mut self, ground: &[Community], detected: &[Community], side: MatchSide) {
        scan_overlaps(ground, detected, |g, d, n| self.observe(g, d, n, side));
    }

    /// Full maxima from a contingency table.
    pub fn from_table(t: &ContingencyTable) -> Self {
        let mut m = MatchMaxima::new(t.row_sizes().len(), t.col_sizes().len());
        for (r, c, n) in t.cells() {
            let (a, b) = (t.row_sizes()[r as usize], t.col_sizes()[c as usize]);
            let normed = 2.0 * n as f64 / (a + b) as f64;
            let (r, c) = (r as usize, c as usize);
            m.max_normed[r] = m.max_normed[r].max(normed);
            m.max_ground[r] = m.max_ground[r].max(n);
            m.max_detected[c] = m.max_detected[c].max(n);
        }
        m
    }

    /// This worker's share of the F-measure numerator and the NVD overlap
    /// sum, over the communities it owns.
    pub fn partial(&self, ground: &[Community], detected: &[Community]) -> MatchingAccumulator {
        let mut acc = MatchingAccumulator::default();
        for c in ground {
            acc.weighted_f += c.size() as f64 * self.max_normed[c.id as usize];
            acc.matched += self.max_ground[c.id as usize];
        }
        for c in detected {
            acc.matched += self.max_detected[c.id as usize];
        }
        acc
    }
}

/// Node index over a set of communities, probed with the members of other
/// communities to find overlaps.
#[derive(Debug, Clone, Default)]
pub struct OverlapIndex {
    owner: HashMap<u64, u32>,
}

impl OverlapIndex {
    pub fn new(communities: &[Community]) -> Self {
        let mut owner = HashMap::with_capacity(communities.iter().map(Community::size).sum());
        for (i, c) in communities.iter().enumerate() {
            for &node in &c.members {
                owner.insert(node, i as u32);
            }
        }
        OverlapIndex { owner }
    }

    /// Visits `(indexed, probe, overlap)` for every positive overlap, in probe
    /// order and then indexed order. `indexed` must be the slice the index
    /// was built from.
    pub fn scan(
        &self,
        indexed: &[Community],
        probes: &[Community],
        mut visit: impl FnMut(&Community, &Community, u64),
    ) {
        if self.owner.is_empty() {
            return;
        }
        let mut counts: HashMap<u32, u64> = HashMap::new();
        let mut order: Vec<u32> = Vec::new();
        for d in probes {
            counts.clear();
            for node in &d.members {
                if let Some(&g) = self.owner.get(node) {
                    *counts.entry(g).or_default() += 1;
                }
            }
            order.clear();
            order.extend(counts.keys().copied());
            order.sort_unstable();
            for &g in &order {
                visit(&indexed[g as usize], d, counts[&g]);
            }
        }
    }
}

/// Visits `(ground, detected, |g ∩ d|)` for every positive overlap. The
/// ground side is indexed by node; detected members probe that index.
pub fn scan_overlaps(ground: &[Community], detected: &[Community], visit: impl FnMut(&Community, &Community, u64)) {
    if ground.is_empty() || detected.is_empty() {
        return;
    }
    OverlapIndex::new(ground).scan(ground, detected, visit);
}

/// Partial sums that merge by addition.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MatchingAccumulator {
    /// Σ |c| · maxNormed(c)
    pub weighted_f: f64,
    /// Σ maxT(c) + Σ maxD(c')
    pub matched: u64,
}

impl MatchingAccumulator {
    pub fn merge(&mut self, other: &MatchingAccumulator) {
        self.weighted_f += other.weighted_f;
        self.matched += other.matched;
    }

    pub fn finish(&self, universe: usize) -> Result<MatchingMetrics> {
        if universe == 0 {
            return Err(Error::EmptyUniverse);
        }
        let n = universe as f64;
        Ok(MatchingMetrics {
            f_measure: self.weighted_f / n,
            nvd: 1.0 - self.matched as f64 / (2.0 * n),
        })
    }
}

/// Updates `m` with the overlaps between two shards.
pub fn update_maxima(m: &mut MatchMaxima, ground: &[Community], detected: &[Community]) {
    m.update(ground, detected, MatchSide::Both);
}

pub fn f_measure(m: &MatchMaxima, ground_sizes: &[u64], universe: usize) -> Result<f64> {
    if universe == 0 {
        return Err(Error::EmptyUniverse);
    }
    let weighted: f64 = ground_sizes
        .iter()
        .zip(&m.max_normed)
        .map(|(&s, &x)| s as f64 * x)
        .sum();
    Ok(weighted / universe as f64)
}

pub fn nvd(m: &MatchMaxima, universe: usize) -> Result<f64> {
    if universe == 0 {
        return Err(Error::EmptyUniverse);
    }
    let matched: u64 = m.max_ground.iter().sum::<u64>() + m.max_detected.iter().sum::<u64>();
    Ok(1.0 - matched as f64 / (2.0 * universe as f64))
}

pub fn matching_metrics(t: &ContingencyTable) -> Result<MatchingMetrics> {
    let m = MatchMaxima::from_table(t);
    Ok(MatchingMetrics {
        f_measure: f_measure(&m, t.row_sizes(), t.universe())?,
        nvd: nvd(&m, t.universe())?,
    })
}

pub(crate) fn all_communities(p: &Partition) -> Vec<Community> {
    p.communities()
        .enumerate()
        .map(|(id, members)| Community {
            id: id as u32,
            members: members.to_vec(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::contingency::build_contingency;
    use crate::partition::shard;
    use proptest::prelude::*;

    fn t1() -> (Partition, Partition) {
        (
            Partition::new(vec![vec![1, 2, 3], vec![4, 5, 6]], 6).unwrap(),
            Partition::new(vec![vec![1, 2], vec![3, 4, 5, 6]], 6).unwrap(),
        )
    }

    #[test]
    fn t1_maxima() {
        let (c, d) = t1();
        let mut m = MatchMaxima::new(2, 2);
        update_maxima(&mut m, &all_communities(&c), &all_communities(&d));
        assert!((m.max_normed[0] - 0.8).abs() < 1e-15);
        assert!((m.max_normed[1] - 6.0 / 7.0).abs() < 1e-15);
        assert_eq!(m.max_ground, vec![2, 3]);
        assert_eq!(m.max_detected, vec![2, 3]);
        assert_eq!(m, MatchMaxima::from_table(&build_contingency(&c, &d).unwrap()));

        let before = m.clone();
        update_maxima(&mut m, &all_communities(&c), &all_communities(&d));
        assert_eq!(m, before);
        update_maxima(&mut m, &all_communities(&c), &[]);
        assert_eq!(m, before);
    }

    #[test]
    fn t1_values() {
        let (c, d) = t1();
        let m = matching_metrics(&build_contingency(&c, &d).unwrap()).unwrap();
        assert!((m.f_measure - 0.828571).abs() < 1e-6);
        assert!((m.f_measure - (3.0 * 0.8 + 3.0 * 6.0 / 7.0) / 6.0).abs() < 1e-15);
        assert!((m.nvd - 0.166667).abs() < 1e-6);

        // F-measure is not symmetric; NVD is.
        let r = matching_metrics(&build_contingency(&d, &c).unwrap()).unwrap();
        assert!((r.f_measure - m.f_measure).abs() > 1e-3);
        assert!((r.nvd - m.nvd).abs() < 1e-15);
    }

    #[test]
    fn identical_and_singletons() {
        let (c, _) = t1();
        let m = matching_metrics(&build_contingency(&c, &c).unwrap()).unwrap();
        assert_eq!((m.f_measure, m.nvd), (1.0, 0.0));

        for n in [1u64, 4, 9, 50] {
            let block = Partition::new(vec![(0..n).collect()], n as usize).unwrap();
            let singles = Partition::new((0..n).map(|i| vec![i]).collect(), n as usize).unwrap();
            let m = matching_metrics(&build_contingency(&block, &singles).unwrap()).unwrap();
            assert!((m.f_measure - 2.0 / (n as f64 + 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_universe() {
        let m = MatchMaxima::new(0, 0);
        assert!(f_measure(&m, &[], 0).is_err());
        assert!(nvd(&m, 0).is_err());
    }

    fn group(labels: &[u8]) -> Partition {
        let mut out = vec![Vec::new(); 256];
        for (i, &l) in labels.iter().enumerate() {
            out[l as usize].push(i as u64);
        }
        out.retain(|c| !c.is_empty());
        Partition::new(out, labels.len()).unwrap()
    }

    /// Direct evaluation with set intersections over all community pairs.
    fn oracle(c: &Partition, d: &Partition) -> (f64, f64) {
        let n = c.universe() as f64;
        let inter = |x: &[u64], y: &[u64]| x.iter().filter(|v| y.contains(v)).count() as f64;
        let mut f = 0.0;
        let mut matched = 0.0;
        for x in c.communities() {
            let mut best: f64 = 0.0;
            let mut best_n: f64 = 0.0;
            for y in d.communities() {
                let k = inter(x, y);
                best = best.max(2.0 * k / (x.len() + y.len()) as f64);
                best_n = best_n.max(k);
            }
            f += x.len() as f64 * best;
            matched += best_n;
        }
        for y in d.communities() {
            matched += c.communities().map(|x| inter(y, x)).fold(0.0, f64::max);
        }
        (f / n, 1.0 - matched / (2.0 * n))
    }

    proptest! {
        #[test]
        fn sharded_updates_equal_single_pass(
            a in prop::collection::vec(0u8..30, 2..150),
            b in prop::collection::vec(0u8..30, 150),
            workers in 1usize..6,
            reverse in any::<bool>(),
        ) {
            let n = a.len();
            let (c, d) = (group(&a), group(&b[..n]));
            let full = MatchMaxima::from_table(&build_contingency(&c, &d).unwrap());

            let mut pieces: Vec<(usize, usize)> =
                (0..workers).flat_map(|g| (0..workers).map(move |w| (g, w))).collect();
            if reverse {
                pieces.reverse();
            }
            let mut m = MatchMaxima::new(c.len(), d.len());
            for (g, w) in pieces {
                let gs = shard(&c, workers, g).unwrap();
                let ds = shard(&d, workers, w).unwrap();
                update_maxima(&mut m, &gs.communities, &ds.communities);
            }
            prop_assert_eq!(&m, &full);

            let (f, v) = oracle(&c, &d);
            let got = matching_metrics(&build_contingency(&c, &d).unwrap()).unwrap();
            prop_assert!((got.f_measure - f).abs() < 1e-12);
            prop_assert!((got.nvd - v).abs() < 1e-12);
            let back = matching_metrics(&build_contingency(&d, &c).unwrap()).unwrap();
            prop_assert!((back.nvd - got.nvd).abs() < 1e-12);
            prop_assert!(got.f_measure > 0.0 && got.f_measure <= 1.0 + 1e-12);
            prop_assert!(got.nvd >= -1e-12 && got.nvd < 1.0);
        }
    }
}
