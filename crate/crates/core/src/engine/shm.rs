//! Worker threads over shared, read-only inputs.

use std::collections::HashMap;

use crate::error::Result;
use crate::graph::Network;
use crate::metrics::info::{InfoAccumulator, InfoMetrics};
use crate::metrics::intrinsic::{stats_for, IntrinsicPartial, IntrinsicReport, NodeAssignment};
use crate::metrics::matching::{all_communities, MatchingAccumulator, MatchingMetrics};
use crate::metrics::pair::{PairCounts, PairLabels};
use crate::partition::{NodeCommunityMap, Partition};

use super::{fan_out, BackendConfig, CommStats, PhaseTiming, RunReport, Stopwatch, WorkerTiming};

fn finish<T, P>(
    setup_seconds: f64,
    wall: Stopwatch,
    parts: Vec<(P, WorkerTiming)>,
    reduce: impl FnOnce(Vec<P>) -> Result<T>,
) -> Result<RunReport<T>> {
    let (parts, timings): (Vec<P>, Vec<WorkerTiming>) = parts.into_iter().unzip();
    let value = reduce(parts)?;
    Ok(RunReport {
        value,
        timing: PhaseTiming::from_workers(wall.seconds(), setup_seconds, timings),
        comm: CommStats::default(),
    })
}

fn compute_only(seconds: f64) -> WorkerTiming {
    WorkerTiming {
        total_seconds: seconds,
        compute_seconds: seconds,
        message_seconds: 0.0,
    }
}

/// Overlap counts of one community against a partition's node map.
fn overlaps(members: &[u64], other: &NodeCommunityMap, counts: &mut HashMap<u32, u64>) {
    counts.clear();
    for &node in members {
        if let Some(c) = other.get(node) {
            *counts.entry(c).or_default() += 1;
        }
    }
}

pub(super) fn info(ground: &Partition, detected: &Partition, cfg: &BackendConfig) -> Result<RunReport<InfoMetrics>> {
    let setup = Stopwatch::start(cfg.timer_enabled);
    let detected_map = detected.to_node_map();
    let detected_sizes = detected.sizes();
    let setup_seconds = setup.seconds();

    let (workers, universe) = (cfg.workers, ground.universe());
    let wall = Stopwatch::start(cfg.timer_enabled);
    let parts = fan_out(workers, |p| {
        let clock = Stopwatch::start(cfg.timer_enabled);
        let mut acc = InfoAccumulator::default();
        let mut counts = HashMap::new();
        for members in ground.communities().skip(p).step_by(workers) {
            overlaps(members, &detected_map, &mut counts);
            let a = members.len() as u64;
            acc.add_cells(
                counts.iter().map(|(&c, &n)| (n, a, detected_sizes[c as usize])),
                universe,
            );
            acc.add_ground(a, universe);
        }
        for &b in detected_sizes.iter().skip(p).step_by(workers) {
            acc.add_detected(b, universe);
        }
        Ok((acc, compute_only(clock.seconds())))
    })?;
    finish(setup_seconds, wall, parts, |parts| {
        let mut total = InfoAccumulator::default();
        for part in &parts {
            total.merge(part);
        }
        total.finish(universe)
    })
}

pub(super) fn matching(
    ground: &Partition,
    detected: &Partition,
    cfg: &BackendConfig,
) -> Result<RunReport<MatchingMetrics>> {
    let setup = Stopwatch::start(cfg.timer_enabled);
    let ground_map = ground.to_node_map();
    let detected_map = detected.to_node_map();
    let detected_sizes = detected.sizes();
    let setup_seconds = setup.seconds();

    let workers = cfg.workers;
    let wall = Stopwatch::start(cfg.timer_enabled);
    let parts = fan_out(workers, |p| {
        let clock = Stopwatch::start(cfg.timer_enabled);
        let mut acc = MatchingAccumulator::default();
        let mut counts = HashMap::new();
        for members in ground.communities().skip(p).step_by(workers) {
            overlaps(members, &detected_map, &mut counts);
            let a = members.len() as u64;
            let best_normed = counts
                .iter()
                .map(|(&c, &n)| 2.0 * n as f64 / (a + detected_sizes[c as usize]) as f64)
                .fold(0.0, f64::max);
            acc.weighted_f += a as f64 * best_normed;
            acc.matched += counts.values().copied().max().unwrap_or(0);
        }
        for members in detected.communities().skip(p).step_by(workers) {
            overlaps(members, &ground_map, &mut counts);
            acc.matched += counts.values().copied().max().unwrap_or(0);
        }
        Ok((acc, compute_only(clock.seconds())))
    })?;
    finish(setup_seconds, wall, parts, |parts| {
        let mut total = MatchingAccumulator::default();
        for part in &parts {
            total.merge(part);
        }
        total.finish(ground.universe())
    })
}

/// Node-striped enumeration of all pairs: worker `p` takes every node
/// `i ≡ p (mod workers)` and compares it with all later nodes.
pub(super) fn pairs(ground: &Partition, detected: &Partition, cfg: &BackendConfig) -> Result<RunReport<PairCounts>> {
    let setup = Stopwatch::start(cfg.timer_enabled);
    let labels = PairLabels::new(&ground.to_node_map(), &detected.to_node_map())?;
    let setup_seconds = setup.seconds();

    let workers = cfg.workers;
    let wall = Stopwatch::start(cfg.timer_enabled);
    let parts = fan_out(workers, |p| {
        let clock = Stopwatch::start(cfg.timer_enabled);
        let counts = labels.count_striped(p, workers);
        Ok((counts, compute_only(clock.seconds())))
    })?;
    finish(setup_seconds, wall, parts, |parts| {
        Ok(parts.into_iter().fold(PairCounts::default(), |a, b| a + b))
    })
}

pub(super) fn intrinsic(
    network: &Network,
    partition: &Partition,
    cfg: &BackendConfig,
) -> Result<RunReport<IntrinsicReport>> {
    let setup = Stopwatch::start(cfg.timer_enabled);
    let assignment = NodeAssignment::new(network, partition)?;
    let communities = all_communities(partition);
    let setup_seconds = setup.seconds();

    let (workers, total_edges) = (cfg.workers, network.edge_count());
    let wall = Stopwatch::start(cfg.timer_enabled);
    let parts = fan_out(workers, |p| {
        let clock = Stopwatch::start(cfg.timer_enabled);
        let stats = stats_for(network, &assignment, communities.iter().skip(p).step_by(workers))?;
        Ok((
            IntrinsicPartial::from_stats(&stats, total_edges),
            compute_only(clock.seconds()),
        ))
    })?;
    finish(setup_seconds, wall, parts, |parts| {
        IntrinsicReport::assemble(parts, total_edges, assignment.unassigned())
    })
}
