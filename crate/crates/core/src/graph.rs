//! Undirected, unweighted networks.
//!
//! External node ids (whatever the edge list used) are re-indexed to dense
//! internal ids `0..node_count`, sorted by external id. When the file already
//! uses `0..n` the mapping is the identity and no lookup table is kept.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::partition::PartitionShard;

#[derive(Debug, Clone, PartialEq, Eq)]
enum NodeLabels {
    Identity,
    Mapped {
        external: Vec<u64>,
        index: HashMap<u64, u32>,
    },
}

/// An undirected simple graph over dense node ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    adjacency: Vec<Vec<u32>>,
    labels: NodeLabels,
    edge_count: u64,
}

/// What the loader discarded while building a [`Network`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadStats {
    pub duplicate_edges: u64,
    pub self_loops: u64,
}

impl Network {
    /// Builds a network over nodes `0..node_count` with identity labels.
    /// Self-loops and repeated edges are dropped.
    pub fn from_edges(node_count: usize, edges: &[(u32, u32)]) -> Result<(Self, LoadStats)> {
        let mut stats = LoadStats::default();
        let mut canonical = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            let max = u.max(v) as u64;
            if max as usize >= node_count {
                return Err(Error::OutOfRange {
                    node: max,
                    universe: node_count,
                });
            }
            if u == v {
                stats.self_loops += 1;
            } else {
                canonical.push((u.min(v), u.max(v)));
            }
        }
        Ok((
            Self::from_canonical(node_count, canonical, NodeLabels::Identity, &mut stats),
            stats,
        ))
    }

    fn from_canonical(
        node_count: usize,
        mut edges: Vec<(u32, u32)>,
        labels: NodeLabels,
        stats: &mut LoadStats,
    ) -> Self {
        edges.sort_unstable();
        let before = edges.len();
        edges.dedup();
        stats.duplicate_edges += (before - edges.len()) as u64;

        let mut degree = vec![0usize; node_count];
        for &(u, v) in &edges {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut adjacency: Vec<Vec<u32>> = degree.iter().map(|&d| Vec::with_capacity(d)).collect();
        for &(u, v) in &edges {
            adjacency[u as usize].push(v);
            adjacency[v as usize].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Network {
            adjacency,
            labels,
            edge_count: edges.len() as u64,
        }
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> u64 {
        self.edge_count
    }

    pub fn neighbors(&self, node: u32) -> &[u32] {
        &self.adjacency[node as usize]
    }

    pub fn degree(&self, node: u32) -> usize {
        self.adjacency[node as usize].len()
    }

    /// The id this node had in the input.
    pub fn external_id(&self, node: u32) -> u64 {
        match &self.labels {
            NodeLabels::Identity => node as u64,
            NodeLabels::Mapped { external, .. } => external[node as usize],
        }
    }

    /// Dense id for an input id, if the node exists.
    pub fn internal_id(&self, external: u64) -> Option<u32> {
        match &self.labels {
            NodeLabels::Identity => (external < self.adjacency.len() as u64).then_some(external as u32),
            NodeLabels::Mapped { index, .. } => index.get(&external).copied(),
        }
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, list)| {
            let u = u as u32;
            list.iter().filter(move |&&v| v > u).map(move |&v| (u, v))
        })
    }

    /// Edges in external ids, `(min, max)` sorted. Independent of re-indexing.
    pub fn external_edges(&self) -> Vec<(u64, u64)> {
        let mut out: Vec<(u64, u64)> = self
            .edges()
            .map(|(u, v)| {
                let (a, b) = (self.external_id(u), self.external_id(v));
                (a.min(b), a.max(b))
            })
            .collect();
        out.sort_unstable();
        out
    }
}

/// Writes one `u v` line per edge in external ids, in the order of
/// [`Network::external_edges`].
pub fn write_edge_list<W: Write>(network: &Network, mut out: W) -> Result<()> {
    for (u, v) in network.external_edges() {
        writeln!(out, "{u} {v}")?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a whitespace-separated `u v` edge list. Lines starting with `#` and
/// blank lines are skipped; tokens after the second on a line are ignored so
/// weighted LFR output still loads.
pub fn load_edge_list<R: BufRead>(reader: R) -> Result<(Network, LoadStats)> {
    let mut raw = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let mut next = |what: &str| -> Result<u64> {
            let tok = tokens.next().ok_or_else(|| Error::Parse {
                line: lineno + 1,
                message: format!("missing {what} endpoint"),
            })?;
            tok.parse::<u64>().map_err(|_| Error::Parse {
                line: lineno + 1,
                message: format!("invalid node id {tok:?}"),
            })
        };
        let u = next("first")?;
        let v = next("second")?;
        raw.push((u, v));
    }
    if raw.is_empty() {
        return Err(Error::Empty("edges"));
    }

    let mut ids: Vec<u64> = raw.iter().flat_map(|&(u, v)| [u, v]).collect();
    ids.sort_unstable();
    ids.dedup();
    if ids.len() > u32::MAX as usize {
        return Err(Error::OutOfRange {
            node: ids[ids.len() - 1],
            universe: u32::MAX as usize,
        });
    }

    let node_count = ids.len();
    let identity = ids.last().copied() == Some(node_count as u64 - 1);
    let mut stats = LoadStats::default();
    let mut canonical = Vec::with_capacity(raw.len());
    let labels = if identity {
        for (u, v) in raw {
            push_canonical(&mut canonical, &mut stats, u as u32, v as u32);
        }
        NodeLabels::Identity
    } else {
        let index: HashMap<u64, u32> = ids.iter().enumerate().map(|(i, &id)| (id, i as u32)).collect();
        for (u, v) in raw {
            push_canonical(&mut canonical, &mut stats, index[&u], index[&v]);
        }
        NodeLabels::Mapped { external: ids, index }
    };
    let network = Network::from_canonical(node_count, canonical, labels, &mut stats);
    if stats.duplicate_edges + stats.self_loops > 0 {
        log::warn!(
            "dropped {} duplicate edges and {} self-loops",
            stats.duplicate_edges,
            stats.self_loops
        );
    }
    Ok((network, stats))
}

fn push_canonical(out: &mut Vec<(u32, u32)>, stats: &mut LoadStats, u: u32, v: u32) {
    if u == v {
        stats.self_loops += 1;
    } else {
        out.push((u.min(v), u.max(v)));
    }
}

/// The part of `network` a worker needs for its shard: the shard's nodes,
/// their one-hop neighbours, and every edge with at least one endpoint in the
/// shard. External ids are preserved.
pub fn local_subgraph(network: &Network, shard: &PartitionShard) -> Result<Network> {
    let mut members = Vec::new();
    for community in &shard.communities {
        for &node in &community.members {
            members.push(network.internal_id(node).ok_or(Error::UnknownNode(node))?);
        }
    }
    let mut inside = vec![false; network.node_count()];
    for &u in &members {
        inside[u as usize] = true;
    }

    let mut local: HashMap<u32, u32> = HashMap::new();
    let mut order: Vec<u32> = Vec::new();
    let mut edges = Vec::new();
    let mut local_id = |u: u32, local: &mut HashMap<u32, u32>| {
        *local.entry(u).or_insert_with(|| {
            order.push(u);
            (order.len() - 1) as u32
        })
    };
    members.sort_unstable();
    for &u in &members {
        let lu = local_id(u, &mut local);
        for &v in network.neighbors(u) {
            // Edges between two shard nodes are emitted once, from the lower end.
            if inside[v as usize] && v < u {
                continue;
            }
            let lv = local_id(v, &mut local);
            edges.push((lu.min(lv), lu.max(lv)));
        }
    }
    let external: Vec<u64> = order.iter().map(|&u| network.external_id(u)).collect();
    let index = external.iter().enumerate().map(|(i, &id)| (id, i as u32)).collect();
    let mut stats = LoadStats::default();
    Ok(Network::from_canonical(
        external.len(),
        edges,
        NodeLabels::Mapped { external, index },
        &mut stats,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{shard, Partition};

    pub(crate) fn t2() -> Network {
        let text = "1 2\n2 3\n1 3\n4 5\n5 6\n4 6\n3 4\n";
        load_edge_list(text.as_bytes()).unwrap().0
    }

    #[test]
    fn path_of_two_edges() {
        let (n, stats) = load_edge_list("0 1\n1 2\n".as_bytes()).unwrap();
        assert_eq!((n.node_count(), n.edge_count()), (3, 2));
        assert_eq!(stats, LoadStats::default());
        assert_eq!(n.external_id(2), 2);
    }

    #[test]
    fn duplicates_and_self_loops_are_dropped() {
        let (n, stats) = load_edge_list("0 1\n1 0\n0 0\n".as_bytes()).unwrap();
        assert_eq!((n.node_count(), n.edge_count()), (2, 1));
        assert_eq!(stats.duplicate_edges, 1);
        assert_eq!(stats.self_loops, 1);
    }

    #[test]
    fn two_triangles_with_bridge() {
        let n = t2();
        assert_eq!((n.node_count(), n.edge_count()), (6, 7));
        // Ids 1..=6 are sparse from 0, so they are re-indexed.
        assert_eq!(n.internal_id(1), Some(0));
        assert_eq!(n.external_id(5), 6);
        assert_eq!(n.internal_id(0), None);
    }

    #[test]
    fn comments_blank_lines_and_extra_columns() {
        let text = "# header\n\n10 20 0.5\n  \n20 30\n";
        let (n, _) = load_edge_list(text.as_bytes()).unwrap();
        assert_eq!(n.external_edges(), vec![(10, 20), (20, 30)]);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match load_edge_list("0 1\n1 x\n".as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            load_edge_list("0\n".as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(load_edge_list("# only\n".as_bytes()), Err(Error::Empty(_))));
    }

    #[test]
    fn adjacency_is_symmetric() {
        let n = t2();
        let mut total = 0;
        for u in 0..n.node_count() as u32 {
            for &v in n.neighbors(u) {
                assert!(n.neighbors(v).contains(&u));
                assert_ne!(u, v);
            }
            total += n.degree(u);
        }
        assert_eq!(total as u64, 2 * n.edge_count());
    }

    fn t2_partition() -> Partition {
        Partition::new(vec![vec![1, 2, 3], vec![4, 5, 6]], 6).unwrap()
    }

    #[test]
    fn local_subgraph_of_one_triangle() {
        let n = t2();
        let s = shard(&t2_partition(), 2, 0).unwrap();
        let local = local_subgraph(&n, &s).unwrap();
        assert_eq!(local.node_count(), 4);
        assert_eq!(local.edge_count(), 4);
        assert_eq!(local.external_edges(), vec![(1, 2), (1, 3), (2, 3), (3, 4)]);
    }

    #[test]
    fn local_subgraph_of_everything_is_the_network() {
        let n = t2();
        let s = shard(&t2_partition(), 1, 0).unwrap();
        let local = local_subgraph(&n, &s).unwrap();
        assert_eq!(local.external_edges(), n.external_edges());
    }

    #[test]
    fn empty_shard_gives_empty_subgraph() {
        let n = t2();
        let s = shard(&t2_partition(), 3, 2).unwrap();
        assert!(s.communities.is_empty());
        let local = local_subgraph(&n, &s).unwrap();
        assert_eq!((local.node_count(), local.edge_count()), (0, 0));
    }
}
