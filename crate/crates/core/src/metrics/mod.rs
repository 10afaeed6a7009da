//! The metric definitions. Each family exposes its formulas as pure functions
//! plus an accumulator whose partial results merge by addition (or `max`), so
//! the parallel engine can split the work by community or by node.

pub mod contingency;
pub mod info;
pub mod intrinsic;
pub mod matching;
pub mod pair;

pub use contingency::{build_contingency, ContingencyTable};
pub use info::{info_metrics, normalized_mutual_information, variation_of_information, InfoAccumulator, InfoMetrics};
pub use intrinsic::{
    community_measures, community_stats, intrinsic_report, modularity, modularity_density, CommunityMeasures,
    CommunityStats, IntrinsicReport, NodeAssignment,
};
pub use matching::{f_measure, matching_metrics, nvd, update_maxima, MatchMaxima, MatchingMetrics};
pub use pair::{
    adjusted_rand_index, jaccard_index, pair_counts_bruteforce, pair_counts_fast, pair_metrics, rand_index, PairCounts,
    PairLabels, PairMetrics,
};
