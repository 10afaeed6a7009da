//! Disjoint partitions of a node universe, their node-keyed view, and the
//! `community id mod workers` sharding every parallel backend uses.
//!
//! Node ids are opaque labels (whatever the community file used); the
//! universe size is a node count, not an id bound.

use std::collections::{HashMap, HashSet};
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// One community together with its global id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Community {
    pub id: u32,
    pub members: Vec<u64>,
}

impl Community {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

/// Disjoint, non-empty communities over a universe of `universe` nodes.
/// A community's id is its index. Members are kept sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    communities: Vec<Vec<u64>>,
    universe: usize,
}

impl Partition {
    pub fn new(mut communities: Vec<Vec<u64>>, universe: usize) -> Result<Self> {
        let mut seen: HashSet<u64> = HashSet::new();
        for community in &mut communities {
            if community.is_empty() {
                return Err(Error::Empty("members in a community"));
            }
            community.sort_unstable();
            for (i, &node) in community.iter().enumerate() {
                if (i > 0 && community[i - 1] == node) || !seen.insert(node) {
                    return Err(Error::Overlap { node });
                }
                if seen.len() > universe {
                    return Err(Error::OutOfRange { node, universe });
                }
            }
        }
        if communities.len() > u32::MAX as usize {
            return Err(Error::Workers("too many communities".into()));
        }
        Ok(Partition { communities, universe })
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn len(&self) -> usize {
        self.communities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.communities.is_empty()
    }

    pub fn community(&self, id: u32) -> &[u64] {
        &self.communities[id as usize]
    }

    pub fn communities(&self) -> impl Iterator<Item = &[u64]> {
        self.communities.iter().map(Vec::as_slice)
    }

    pub fn sizes(&self) -> Vec<u64> {
        self.communities.iter().map(|c| c.len() as u64).collect()
    }

    /// Number of nodes that belong to some community.
    pub fn covered(&self) -> usize {
        self.communities.iter().map(Vec::len).sum()
    }

    /// Same partition with a different declared universe.
    pub fn with_universe(self, universe: usize) -> Result<Self> {
        Partition::new(self.communities, universe)
    }

    pub fn to_node_map(&self) -> NodeCommunityMap {
        to_node_map(self)
    }
}

/// Writes one community per line in id order, members space-separated.
pub fn write_communities<W: Write>(partition: &Partition, mut out: W) -> Result<()> {
    for members in partition.communities() {
        let mut first = true;
        for node in members {
            if !first {
                out.write_all(b" ")?;
            }
            write!(out, "{node}")?;
            first = false;
        }
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Reads one community per line, whitespace-separated node ids, `#` comments.
pub fn load_communities<R: BufRead>(reader: R, universe: usize) -> Result<Partition> {
    let mut communities = Vec::new();
    let mut seen: HashSet<u64> = HashSet::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut members = Vec::new();
        for tok in trimmed.split_whitespace() {
            let node: u64 = tok.parse().map_err(|_| Error::Parse {
                line: lineno + 1,
                message: format!("invalid node id {tok:?}"),
            })?;
            if !seen.insert(node) {
                return Err(Error::Overlap { node });
            }
            if seen.len() > universe {
                return Err(Error::OutOfRange { node, universe });
            }
            members.push(node);
        }
        communities.push(members);
    }
    if communities.is_empty() {
        return Err(Error::Empty("communities"));
    }
    Partition::new(communities, universe)
}

/// Node-keyed view of a partition: node id to community id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeCommunityMap {
    entries: HashMap<u64, u32>,
    community_count: usize,
    universe: usize,
}

impl NodeCommunityMap {
    pub fn get(&self, node: u64) -> Option<u32> {
        self.entries.get(&node).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn community_count(&self) -> usize {
        self.community_count
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u32)> + '_ {
        self.entries.iter().map(|(&n, &c)| (n, c))
    }

    /// Rebuilds the partition, communities ordered by id.
    pub fn to_partition(&self) -> Result<Partition> {
        let mut communities = vec![Vec::new(); self.community_count];
        for (&node, &c) in &self.entries {
            communities[c as usize].push(node);
        }
        Partition::new(communities, self.universe)
    }
}

pub fn to_node_map(partition: &Partition) -> NodeCommunityMap {
    let mut entries = HashMap::with_capacity(partition.covered());
    for (id, members) in partition.communities.iter().enumerate() {
        for &node in members {
            entries.insert(node, id as u32);
        }
    }
    NodeCommunityMap {
        entries,
        community_count: partition.len(),
        universe: partition.universe,
    }
}

/// The communities of a partition owned by one worker.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionShard {
    pub owner: usize,
    pub workers: usize,
    pub communities: Vec<Community>,
}

impl PartitionShard {
    pub fn node_count(&self) -> usize {
        self.communities.iter().map(Community::size).sum()
    }
}

pub(crate) fn check_workers(workers: usize, worker: usize) -> Result<()> {
    if workers == 0 {
        return Err(Error::Workers("worker count must be positive".into()));
    }
    if worker >= workers {
        return Err(Error::Workers(format!(
            "worker {worker} out of range for {workers} workers"
        )));
    }
    Ok(())
}

/// Community `k` goes to worker `k mod workers`.
pub fn shard(partition: &Partition, workers: usize, worker: usize) -> Result<PartitionShard> {
    check_workers(workers, worker)?;
    let communities = partition
        .communities
        .iter()
        .enumerate()
        .skip(worker)
        .step_by(workers)
        .map(|(id, members)| Community {
            id: id as u32,
            members: members.clone(),
        })
        .collect();
    Ok(PartitionShard {
        owner: worker,
        workers,
        communities,
    })
}
