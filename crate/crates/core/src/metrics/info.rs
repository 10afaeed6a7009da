//! Variation of information and normalized mutual information.
//!
//! Logarithms are natural, so VI is in nats; [`nats_to_bits`] converts. NMI
//! does not depend on the base.

use crate::error::{Error, Result};
use crate::metrics::contingency::ContingencyTable;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfoMetrics {
    pub vi: f64,
    pub nmi: f64,
}

/// Running sums behind VI and NMI. Partial accumulators over disjoint sets of
/// cells (and disjoint sets of communities for the entropy terms) merge by
/// addition.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct InfoAccumulator {
    /// Σ n ln(n² / (|c||c'|)) over cells.
    pub overlap: f64,
    /// Σ n ln(n|V| / (|c||c'|)) over cells.
    pub mutual: f64,
    /// Σ |c| ln(|c|/|V|) over ground-truth communities.
    pub ground_entropy: f64,
    /// Σ |c'| ln(|c'|/|V|) over detected communities.
    pub detected_entropy: f64,
}

impl InfoAccumulator {
    /// Adds a batch of cells, given as `(overlap, ground size, detected size)`
    /// with positive overlap. The batch is summed on its own before it is
    /// folded into the totals.
    pub fn add_cells(&mut self, cells: impl IntoIterator<Item = (u64, u64, u64)>, universe: usize) {
        let n_total = universe as f64;
        let (mut overlap, mut mutual) = (0.0, 0.0);
        for (n, a, b) in cells {
            let n = n as f64;
            let ab = a as f64 * b as f64;
            overlap += n * (n * n / ab).ln();
            mutual += n * (n * n_total / ab).ln();
        }
        self.overlap += overlap;
        self.mutual += mutual;
    }

    pub fn add_ground(&mut self, size: u64, universe: usize) {
        let a = size as f64;
        self.ground_entropy += a * (a / universe as f64).ln();
    }

    pub fn add_detected(&mut self, size: u64, universe: usize) {
        let b = size as f64;
        self.detected_entropy += b * (b / universe as f64).ln();
    }

    pub fn merge(&mut self, other: &InfoAccumulator) {
        self.overlap += other.overlap;
        self.mutual += other.mutual;
        self.ground_entropy += other.ground_entropy;
        self.detected_entropy += other.detected_entropy;
    }

    pub fn finish(&self, universe: usize) -> Result<InfoMetrics> {
        if universe == 0 {
            return Err(Error::EmptyUniverse);
        }
        let n = universe as f64;
        // Adding zero turns -0.0 into 0.0. A partition that leaves nodes
        // uncovered can give a negative sum, which is reported as is.
        let vi = -self.overlap / n + 0.0;
        let denominator = (self.ground_entropy + self.detected_entropy) / n;
        // Both partitions are a single block covering everything: 0/0.
        let nmi = if denominator == 0.0 {
            1.0
        } else {
            -2.0 * (self.mutual / n) / denominator
        };
        Ok(InfoMetrics { vi, nmi })
    }

    pub fn from_table(t: &ContingencyTable) -> InfoAccumulator {
        let universe = t.universe();
        let mut acc = InfoAccumulator::default();
        for (row, &a) in t.rows().iter().zip(t.row_sizes()) {
            acc.add_cells(row.iter().map(|&(c, n)| (n, a, t.col_sizes()[c as usize])), universe);
            acc.add_ground(a, universe);
        }
        for &b in t.col_sizes() {
            acc.add_detected(b, universe);
        }
        acc
    }
}

pub fn info_metrics(t: &ContingencyTable) -> Result<InfoMetrics> {
    InfoAccumulator::from_table(t).finish(t.universe())
}

pub fn variation_of_information(t: &ContingencyTable) -> Result<f64> {
    info_metrics(t).map(|m| m.vi)
}

pub fn normalized_mutual_information(t: &ContingencyTable) -> Result<f64> {
    info_metrics(t).map(|m| m.nmi)
}

pub fn nats_to_bits(nats: f64) -> f64 {
    nats / std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::contingency::build_contingency;
    use crate::partition::Partition;
    use proptest::prelude::*;

    fn t1() -> ContingencyTable {
        let c = Partition::new(vec![vec![1, 2, 3], vec![4, 5, 6]], 6).unwrap();
        let d = Partition::new(vec![vec![1, 2], vec![3, 4, 5, 6]], 6).unwrap();
        build_contingency(&c, &d).unwrap()
    }

    #[test]
    fn t1_values() {
        let m = info_metrics(&t1()).unwrap();
        assert!((m.vi - std::f64::consts::LN_2).abs() < 1e-12);
        assert!((m.nmi - 0.478704).abs() < 1e-6, "{}", m.nmi);
        assert!((nats_to_bits(m.vi) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identical_partitions() {
        let c = Partition::new(vec![vec![0, 1], vec![2, 3, 4], vec![5]], 6).unwrap();
        let m = info_metrics(&build_contingency(&c, &c).unwrap()).unwrap();
        assert_eq!(m.vi, 0.0);
        assert!((m.nmi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn one_block_against_singletons() {
        for n in [2u64, 5, 17, 100] {
            let block = Partition::new(vec![(0..n).collect()], n as usize).unwrap();
            let singles = Partition::new((0..n).map(|i| vec![i]).collect(), n as usize).unwrap();
            let m = info_metrics(&build_contingency(&block, &singles).unwrap()).unwrap();
            assert!((m.vi - (n as f64).ln()).abs() < 1e-12);
            // Mutual information is zero when one side is a single block.
            assert!(m.nmi.abs() < 1e-12);
        }
    }

    #[test]
    fn both_trivial_is_one_by_convention() {
        let block = Partition::new(vec![vec![0, 1, 2]], 3).unwrap();
        let m = info_metrics(&build_contingency(&block, &block).unwrap()).unwrap();
        assert_eq!((m.vi, m.nmi), (0.0, 1.0));
    }

    #[test]
    fn empty_universe_is_an_error() {
        let t = InfoAccumulator::default();
        assert!(matches!(t.finish(0), Err(Error::EmptyUniverse)));
    }

    /// Direct double loop over every community pair with set intersection.
    fn dense_oracle(c: &[Vec<u64>], d: &[Vec<u64>], universe: usize) -> (f64, f64) {
        let n = universe as f64;
        let (mut vi, mut mi, mut hc, mut hd) = (0.0, 0.0, 0.0, 0.0);
        for x in c {
            for y in d {
                let k = x.iter().filter(|v| y.contains(v)).count() as f64;
                if k > 0.0 {
                    let (a, b) = (x.len() as f64, y.len() as f64);
                    vi -= k * (k * k / (a * b)).ln() / n;
                    mi += k / n * (k * n / (a * b)).ln();
                }
            }
        }
        for x in c {
            let p = x.len() as f64 / n;
            hc += p * p.ln();
        }
        for y in d {
            let p = y.len() as f64 / n;
            hd += p * p.ln();
        }
        (vi, -2.0 * mi / (hc + hd))
    }

    fn group(labels: &[u8]) -> Vec<Vec<u64>> {
        let mut out = vec![Vec::new(); 256];
        for (i, &l) in labels.iter().enumerate() {
            out[l as usize].push(i as u64);
        }
        out.retain(|c| !c.is_empty());
        out
    }

    proptest! {
        #[test]
        fn matches_dense_oracle_and_is_symmetric(
            a in prop::collection::vec(0u8..50, 2..200),
            seed in prop::collection::vec(0u8..50, 200),
        ) {
            let n = a.len();
            let b: Vec<u8> = seed[..n].to_vec();
            let (cg, dg) = (group(&a), group(&b));
            prop_assume!(cg.len() > 1 || dg.len() > 1);
            let c = Partition::new(cg.clone(), n).unwrap();
            let d = Partition::new(dg.clone(), n).unwrap();
            let t = build_contingency(&c, &d).unwrap();
            let m = info_metrics(&t).unwrap();
            let (vi, nmi) = dense_oracle(&cg, &dg, n);
            prop_assert!((m.vi - vi).abs() < 1e-12);
            prop_assert!((m.nmi - nmi).abs() < 1e-12);
            prop_assert!(m.vi >= -1e-12);
            prop_assert!(m.nmi >= -1e-12 && m.nmi <= 1.0 + 1e-12);
            let swapped = info_metrics(&t.transpose()).unwrap();
            prop_assert!((swapped.vi - m.vi).abs() < 1e-12);
            prop_assert!((swapped.nmi - m.nmi).abs() < 1e-12);
        }

        #[test]
        fn self_comparison(a in prop::collection::vec(0u8..20, 2..150)) {
            let c = Partition::new(group(&a), a.len()).unwrap();
            prop_assume!(c.len() >= 2);
            let m = info_metrics(&build_contingency(&c, &c).unwrap()).unwrap();
            prop_assert!(m.vi.abs() < 1e-12);
            prop_assert!((m.nmi - 1.0).abs() < 1e-12);
        }
    }
}
