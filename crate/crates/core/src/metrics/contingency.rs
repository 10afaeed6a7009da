use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::partition::Partition;

/// Sparse overlap counts `|c ∩ c'|` between a ground-truth partition (rows)
/// and a detected partition (columns). Only positive cells are stored; each
/// row is sorted by column id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    rows: Vec<Vec<(u32, u64)>>,
    row_sizes: Vec<u64>,
    col_sizes: Vec<u64>,
    universe: usize,
}

impl ContingencyTable {
    pub fn rows(&self) -> &[Vec<(u32, u64)>] {
        &self.rows
    }

    pub fn row_sizes(&self) -> &[u64] {
        &self.row_sizes
    }

    pub fn col_sizes(&self) -> &[u64] {
        &self.col_sizes
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn cells(&self) -> impl Iterator<Item = (u32, u32, u64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |&(c, n)| (r as u32, c, n)))
    }

    pub fn total(&self) -> u64 {
        self.cells().map(|(_, _, n)| n).sum()
    }

    /// Swaps the roles of the two partitions.
    pub fn transpose(&self) -> ContingencyTable {
        let mut rows = vec![Vec::new(); self.col_sizes.len()];
        for (r, c, n) in self.cells() {
            rows[c as usize].push((r, n));
        }
        ContingencyTable {
            rows,
            row_sizes: self.col_sizes.clone(),
            col_sizes: self.row_sizes.clone(),
            universe: self.universe,
        }
    }
}

pub fn build_contingency(ground: &Partition, detected: &Partition) -> Result<ContingencyTable> {
    if ground.universe() != detected.universe() {
        return Err(Error::UniverseMismatch(ground.universe(), detected.universe()));
    }
    let detected_map = detected.to_node_map();
    let mut counts: HashMap<u32, u64> = HashMap::new();
    let rows = ground
        .communities()
        .map(|members| {
            counts.clear();
            for &node in members {
                if let Some(c) = detected_map.get(node) {
                    *counts.entry(c).or_default() += 1;
                }
            }
            let mut row: Vec<(u32, u64)> = counts.iter().map(|(&c, &n)| (c, n)).collect();
            row.sort_unstable();
            row
        })
        .collect();
    Ok(ContingencyTable {
        rows,
        row_sizes: ground.sizes(),
        col_sizes: detected.sizes(),
        universe: ground.universe(),
    })
}
