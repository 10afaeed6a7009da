//! Ground-truth-free quality: modularity, modularity density, and six
//! per-community measures.
//!
//! Everything here is a function of per-community edge statistics
//! ([`CommunityStats`]), which a worker can collect from a local subgraph
//! holding its communities plus their one-hop neighbours.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::graph::Network;
use crate::partition::{Community, Partition};

const UNASSIGNED: u32 = u32::MAX;

/// Community id of every node of one network, plus the sizes of every
/// community that appears in it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeAssignment {
    community: Vec<u32>,
    sizes: HashMap<u32, u64>,
}

impl NodeAssignment {
    /// Every member of `partition` must be a node of `network`.
    pub fn new(network: &Network, partition: &Partition) -> Result<Self> {
        let mut community = vec![UNASSIGNED; network.node_count()];
        let mut sizes = HashMap::with_capacity(partition.len());
        for (id, members) in partition.communities().enumerate() {
            for &node in members {
                let u = network.internal_id(node).ok_or(Error::UnknownNode(node))?;
                community[u as usize] = id as u32;
            }
            sizes.insert(id as u32, members.len() as u64);
        }
        Ok(NodeAssignment { community, sizes })
    }

    /// The same assignment for `local`, a subgraph of `global` that shares
    /// its external ids.
    pub fn restrict(&self, global: &Network, local: &Network) -> Result<Self> {
        let mut community = Vec::with_capacity(local.node_count());
        let mut sizes = HashMap::new();
        for u in 0..local.node_count() as u32 {
            let external = local.external_id(u);
            let g = global.internal_id(external).ok_or(Error::UnknownNode(external))?;
            let c = self.community[g as usize];
            if c != UNASSIGNED {
                sizes.insert(c, self.sizes[&c]);
            }
            community.push(c);
        }
        Ok(NodeAssignment { community, sizes })
    }

    pub fn community_of(&self, node: u32) -> Option<u32> {
        let c = self.community[node as usize];
        (c != UNASSIGNED).then_some(c)
    }

    pub fn size_of(&self, community: u32) -> Option<u64> {
        self.sizes.get(&community).copied()
    }

    /// Nodes that belong to no community.
    pub fn unassigned(&self) -> usize {
        self.community.iter().filter(|&&c| c == UNASSIGNED).count()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NeighborEdges {
    /// Edges between the two communities.
    pub edges: u64,
    /// Size of the neighbouring community.
    pub size: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CommunityStats {
    pub id: u32,
    pub size: u64,
    /// Edges with both endpoints inside.
    pub in_edges: u64,
    /// Edges with exactly one endpoint inside.
    pub out_edges: u64,
    /// Boundary edges broken down by the community on the other side. Edges to
    /// unassigned nodes count in `out_edges` only.
    pub neighbors: BTreeMap<u32, NeighborEdges>,
}

impl CommunityStats {
    /// 2|E_in| / (|c|(|c|-1)); zero for a single node.
    pub fn intra_density(&self) -> f64 {
        if self.size <= 1 {
            0.0
        } else {
            2.0 * self.in_edges as f64 / (self.size * (self.size - 1)) as f64
        }
    }

    pub fn modularity_term(&self, total_edges: u64) -> f64 {
        let m = total_edges as f64;
        let degree_share = (2 * self.in_edges + self.out_edges) as f64 / (2.0 * m);
        self.in_edges as f64 / m - degree_share * degree_share
    }

    /// Contribution to modularity density. The split penalty runs over
    /// neighbouring communities only; pairs with no edges contribute zero.
    pub fn density_term(&self, total_edges: u64) -> f64 {
        let m = total_edges as f64;
        let d = self.intra_density();
        let degree_share = (2 * self.in_edges + self.out_edges) as f64 / (2.0 * m) * d;
        let penalty: f64 = self
            .neighbors
            .values()
            .map(|n| {
                let pair_density = n.edges as f64 / (self.size * n.size) as f64;
                n.edges as f64 / (2.0 * m) * pair_density
            })
            .sum();
        self.in_edges as f64 / m * d - degree_share * degree_share - penalty
    }
}

/// Statistics for the given communities, read off `network`. The network may
/// be a local subgraph, as long as it holds every edge incident to these
/// communities.
pub fn stats_for<'a>(
    network: &Network,
    assignment: &NodeAssignment,
    communities: impl IntoIterator<Item = &'a Community>,
) -> Result<Vec<CommunityStats>> {
    communities
        .into_iter()
        .map(|c| {
            let mut stats = CommunityStats {
                id: c.id,
                size: c.size() as u64,
                ..Default::default()
            };
            let mut inside_endpoints = 0u64;
            for &node in &c.members {
                let u = network.internal_id(node).ok_or(Error::UnknownNode(node))?;
                for &v in network.neighbors(u) {
                    match assignment.community_of(v) {
                        Some(other) if other == c.id => inside_endpoints += 1,
                        Some(other) => {
                            stats.out_edges += 1;
                            let entry = stats.neighbors.entry(other).or_insert(NeighborEdges {
                                edges: 0,
                                size: assignment.size_of(other).unwrap_or(0),
                            });
                            entry.edges += 1;
                        }
                        None => stats.out_edges += 1,
                    }
                }
            }
            stats.in_edges = inside_endpoints / 2;
            Ok(stats)
        })
        .collect()
}

pub fn community_stats(network: &Network, partition: &Partition) -> Result<Vec<CommunityStats>> {
    let assignment = NodeAssignment::new(network, partition)?;
    stats_for(
        network,
        &assignment,
        &crate::metrics::matching::all_communities(partition),
    )
}

pub fn modularity(stats: &[CommunityStats], total_edges: u64) -> Result<f64> {
    if total_edges == 0 {
        return Err(Error::NoEdges);
    }
    Ok(stats.iter().map(|s| s.modularity_term(total_edges)).sum())
}

pub fn modularity_density(stats: &[CommunityStats], total_edges: u64) -> Result<f64> {
    if total_edges == 0 {
        return Err(Error::NoEdges);
    }
    Ok(stats.iter().map(|s| s.density_term(total_edges)).sum())
}

/// The six per-community measures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommunityMeasures {
    pub id: u32,
    pub size: u64,
    pub intra_edges: u64,
    pub intra_density: f64,
    pub contraction: f64,
    pub inter_edges: u64,
    pub expansion: f64,
    /// Zero for a community with no incident edges at all.
    pub conductance: f64,
}

impl CommunityMeasures {
    pub fn from_stats(s: &CommunityStats) -> Self {
        let size = s.size as f64;
        let volume = 2 * s.in_edges + s.out_edges;
        CommunityMeasures {
            id: s.id,
            size: s.size,
            intra_edges: s.in_edges,
            intra_density: s.intra_density(),
            contraction: 2.0 * s.in_edges as f64 / size,
            inter_edges: s.out_edges,
            expansion: s.out_edges as f64 / size,
            conductance: if volume == 0 {
                0.0
            } else {
                s.out_edges as f64 / volume as f64
            },
        }
    }

    /// No incident edges, so conductance fell back to zero.
    pub fn is_edgeless(&self) -> bool {
        self.intra_edges == 0 && self.inter_edges == 0
    }
}

pub fn community_measures(stats: &[CommunityStats]) -> Vec<CommunityMeasures> {
    stats.iter().map(CommunityMeasures::from_stats).collect()
}

/// Unweighted means of the six measures across communities.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MeanMeasures {
    pub intra_edges: f64,
    pub intra_density: f64,
    pub contraction: f64,
    pub inter_edges: f64,
    pub expansion: f64,
    pub conductance: f64,
}

/// One worker's share of an intrinsic computation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IntrinsicPartial {
    pub rows: Vec<CommunityMeasures>,
    pub modularity: f64,
    pub modularity_density: f64,
}

impl IntrinsicPartial {
    pub fn from_stats(stats: &[CommunityStats], total_edges: u64) -> Self {
        IntrinsicPartial {
            rows: community_measures(stats),
            modularity: stats.iter().map(|s| s.modularity_term(total_edges)).sum(),
            modularity_density: stats.iter().map(|s| s.density_term(total_edges)).sum(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntrinsicReport {
    /// One row per community, ordered by id.
    pub rows: Vec<CommunityMeasures>,
    pub modularity: f64,
    pub modularity_density: f64,
    pub total_edges: u64,
    pub community_count: usize,
    pub mean: MeanMeasures,
    /// Communities whose conductance used the zero convention.
    pub edgeless_communities: usize,
    pub unassigned_nodes: usize,
}

impl IntrinsicReport {
    /// Sums partials in the order given.
    pub fn assemble(parts: Vec<IntrinsicPartial>, total_edges: u64, unassigned_nodes: usize) -> Result<Self> {
        if total_edges == 0 {
            return Err(Error::NoEdges);
        }
        let mut rows = Vec::new();
        let (mut q, mut qds) = (0.0, 0.0);
        for part in parts {
            q += part.modularity;
            qds += part.modularity_density;
            rows.extend(part.rows);
        }
        rows.sort_by_key(|r| r.id);
        let k = rows.len().max(1) as f64;
        let mut mean = MeanMeasures::default();
        for r in &rows {
            mean.intra_edges += r.intra_edges as f64 / k;
            mean.intra_density += r.intra_density / k;
            mean.contraction += r.contraction / k;
            mean.inter_edges += r.inter_edges as f64 / k;
            mean.expansion += r.expansion / k;
            mean.conductance += r.conductance / k;
        }
        Ok(IntrinsicReport {
            edgeless_communities: rows.iter().filter(|r| r.is_edgeless()).count(),
            community_count: rows.len(),
            rows,
            modularity: q,
            modularity_density: qds,
            total_edges,
            mean,
            unassigned_nodes,
        })
    }
}

pub fn intrinsic_report(network: &Network, partition: &Partition) -> Result<IntrinsicReport> {
    let assignment = NodeAssignment::new(network, partition)?;
    let stats = stats_for(
        network,
        &assignment,
        &crate::metrics::matching::all_communities(partition),
    )?;
    let total = network.edge_count();
    if total == 0 {
        return Err(Error::NoEdges);
    }
    IntrinsicReport::assemble(
        vec![IntrinsicPartial::from_stats(&stats, total)],
        total,
        assignment.unassigned(),
    )
}
