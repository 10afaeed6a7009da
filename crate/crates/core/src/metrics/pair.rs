//! Rand, adjusted Rand and Jaccard indices from node-pair tallies.
//!
//! Two ways to get the tallies: [`pair_counts_bruteforce`] enumerates every
//! unordered node pair and serves as the oracle; [`pair_counts_fast`] derives
//! the same integers from a contingency table. Nodes a partition does not
//! cover behave as singletons of that partition.

use std::ops::{Add, AddAssign};

use crate::error::{Error, Result};
use crate::metrics::contingency::ContingencyTable;
use crate::partition::NodeCommunityMap;

/// Node-pair tallies: `a11` same community in both partitions, `a10` same in
/// the ground truth only, `a01` same in the detected partition only, `a00`
/// different in both.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct PairCounts {
    pub a11: u64,
    pub a10: u64,
    pub a01: u64,
    pub a00: u64,
}

impl PairCounts {
    pub fn total(&self) -> u64 {
        self.a11 + self.a10 + self.a01 + self.a00
    }
}

impl Add for PairCounts {
    type Output = PairCounts;

    fn add(self, o: PairCounts) -> PairCounts {
        PairCounts {
            a11: self.a11 + o.a11,
            a10: self.a10 + o.a10,
            a01: self.a01 + o.a01,
            a00: self.a00 + o.a00,
        }
    }
}

impl AddAssign for PairCounts {
    fn add_assign(&mut self, o: PairCounts) {
        *self = *self + o;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairMetrics {
    pub ri: f64,
    pub ari: f64,
    pub ji: f64,
}

fn choose2(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

/// Dense per-node labels over the whole universe, one array per partition.
/// Nodes missing from a partition get a label of their own.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairLabels {
    pub ground: Vec<u32>,
    pub detected: Vec<u32>,
}

impl PairLabels {
    pub fn new(ground: &NodeCommunityMap, detected: &NodeCommunityMap) -> Result<Self> {
        if ground.universe() != detected.universe() {
            return Err(Error::UniverseMismatch(ground.universe(), detected.universe()));
        }
        let universe = ground.universe();
        let mut nodes: Vec<u64> = ground.iter().map(|(n, _)| n).collect();
        nodes.extend(detected.iter().map(|(n, _)| n).filter(|&n| ground.get(n).is_none()));
        nodes.sort_unstable();
        if nodes.len() > universe {
            return Err(Error::OutOfRange {
                node: nodes[universe],
                universe,
            });
        }
        let mut next_g = ground.community_count() as u32;
        let mut next_d = detected.community_count() as u32;
        let fresh = |next: &mut u32| {
            *next += 1;
            *next - 1
        };
        let mut labels = PairLabels {
            ground: Vec::with_capacity(universe),
            detected: Vec::with_capacity(universe),
        };
        for &node in &nodes {
            let g = ground.get(node).unwrap_or_else(|| fresh(&mut next_g));
            let d = detected.get(node).unwrap_or_else(|| fresh(&mut next_d));
            labels.ground.push(g);
            labels.detected.push(d);
        }
        for _ in nodes.len()..universe {
            let g = fresh(&mut next_g);
            let d = fresh(&mut next_d);
            labels.ground.push(g);
            labels.detected.push(d);
        }
        Ok(labels)
    }

    pub fn len(&self) -> usize {
        self.ground.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ground.is_empty()
    }

    /// Tallies the pairs `(i, j)`, `i < j`, for every `i ≡ worker (mod workers)`.
    /// Summed over all workers this is every pair exactly once.
    pub fn ground(&self) -> &[u32] {
        &self.ground
    }

    pub fn detected(&self) -> &[u32] {
        &self.detected
    }

    /// Counts the pairs `(i, j)` with `i < j` and `i ≡ worker (mod workers)`.
    pub fn count_striped(&self, worker: usize, workers: usize) -> PairCounts {
        let n = self.len();
        let mut out = PairCounts::default();
        for i in (worker..n).step_by(workers.max(1)) {
            out += count_against(
                self.ground[i],
                self.detected[i],
                &self.ground[i + 1..],
                &self.detected[i + 1..],
            );
        }
        out
    }
}

/// Enumerates all `|V|(|V|-1)/2` node pairs.
/// Classifies the pairs between one node, labelled `(gi, di)`, and every node
/// of the label slices.
pub fn count_against(gi: u32, di: u32, ground: &[u32], detected: &[u32]) -> PairCounts {
    let (mut both, mut same_g, mut same_d) = (0u32, 0u32, 0u32);
    for (&gj, &dj) in ground.iter().zip(detected) {
        let x = (gj == gi) as u32;
        let y = (dj == di) as u32;
        both += x & y;
        same_g += x;
        same_d += y;
    }
    let pairs = ground.len().min(detected.len()) as u64;
    let (both, same_g, same_d) = (both as u64, same_g as u64, same_d as u64);
    PairCounts {
        a11: both,
        a10: same_g - both,
        a01: same_d - both,
        a00: pairs + both - same_g - same_d,
    }
}

pub fn pair_counts_bruteforce(ground: &NodeCommunityMap, detected: &NodeCommunityMap) -> Result<PairCounts> {
    Ok(PairLabels::new(ground, detected)?.count_striped(0, 1))
}

/// Same tallies from overlap counts:
/// `a11 = Σ C(n_ij, 2)`, `a11 + a10 = Σ C(|c|, 2)`, `a11 + a01 = Σ C(|c'|, 2)`,
/// and `a00` as the remainder of `C(|V|, 2)`.
pub fn pair_counts_fast(t: &ContingencyTable) -> PairCounts {
    let a11: u64 = t.cells().map(|(_, _, n)| choose2(n)).sum();
    let same_g: u64 = t.row_sizes().iter().map(|&s| choose2(s)).sum();
    let same_d: u64 = t.col_sizes().iter().map(|&s| choose2(s)).sum();
    let total = choose2(t.universe() as u64);
    PairCounts {
        a11,
        a10: same_g - a11,
        a01: same_d - a11,
        a00: total + a11 - same_g - same_d,
    }
}

pub fn rand_index(p: &PairCounts) -> Result<f64> {
    let total = p.total();
    if total == 0 {
        return Err(Error::Degenerate("RI"));
    }
    Ok((p.a11 + p.a00) as f64 / total as f64)
}

/// Both partitions trivial in the same way (both all-singletons or both one
/// block) makes the denominator vanish; that agreement scores 1.
pub fn adjusted_rand_index(p: &PairCounts) -> Result<f64> {
    let total = p.total();
    if total == 0 {
        return Err(Error::Degenerate("ARI"));
    }
    let same_g = (p.a11 + p.a10) as f64;
    let same_d = (p.a11 + p.a01) as f64;
    let expected = same_g * same_d / total as f64;
    let denominator = 0.5 * (same_g + same_d) - expected;
    if denominator == 0.0 {
        return if p.a10 == 0 && p.a01 == 0 {
            Ok(1.0)
        } else {
            Err(Error::Degenerate("ARI"))
        };
    }
    Ok((p.a11 as f64 - expected) / denominator)
}

/// No pair shares a community on either side: scores 1 by convention.
pub fn jaccard_index(p: &PairCounts) -> Result<f64> {
    let denominator = p.a11 + p.a10 + p.a01;
    if denominator == 0 {
        return Ok(1.0);
    }
    Ok(p.a11 as f64 / denominator as f64)
}

pub fn pair_metrics(p: &PairCounts) -> Result<PairMetrics> {
    Ok(PairMetrics {
        ri: rand_index(p)?,
        ari: adjusted_rand_index(p)?,
        ji: jaccard_index(p)?,
    })
}
