//! Community-quality metrics for network partitions.
//!
//! Seven metrics compare a detected partition with a ground truth (variation
//! of information, NMI, F-measure, normalized van Dongen, Rand, adjusted Rand
//! and Jaccard), and eight need only the network (modularity, modularity
//! density and six per-community measures). Every metric family runs on a
//! sequential, a shared-memory, or a ring message-passing backend; see
//! [`engine`]. The [`bench`] module measures how they scale.

pub mod bench;
pub mod engine;
mod error;
pub mod graph;
pub mod metrics;
pub mod partition;

pub use error::{Error, Result};
pub use graph::{load_edge_list, local_subgraph, write_edge_list, LoadStats, Network};
pub use partition::{
    load_communities, shard, write_communities, Community, NodeCommunityMap, Partition, PartitionShard,
};
