//! Message-passing backend: isolated workers on a unidirectional ring.
//!
//! Worker `p` receives from `p - 1` and sends to `p + 1` (mod `workers`).
//! Each worker starts with only its own shards. In a circulation phase every
//! worker sends the shard it holds, receives its predecessor's, processes it
//! against its own data and forwards it on the next step, so after
//! `workers - 1` steps each worker has seen every foreign shard exactly once.
//! Payloads travel as bytes (see [`super::wire`]) over bounded channels.
//!
//! Pair counting uses ground-truth-labelled node records. A pair of nodes
//! held by different workers is counted by the worker holding the node with
//! the smaller ground-truth label, so each pair is counted once.

use std::collections::HashMap;
use std::sync::mpsc::{sync_channel, Receiver, RecvTimeoutError, SyncSender};
use std::time::Duration;

use crate::error::{Error, Result};
use crate::graph::{local_subgraph, Network};
use crate::metrics::info::{InfoAccumulator, InfoMetrics};
use crate::metrics::intrinsic::{stats_for, IntrinsicPartial, IntrinsicReport, NodeAssignment};
use crate::metrics::matching::{MatchMaxima, MatchSide, MatchingAccumulator, MatchingMetrics, OverlapIndex};
use crate::metrics::pair::{count_against, PairCounts, PairLabels};
use crate::partition::{shard, Partition, PartitionShard};

use super::wire::{self, LabelledCommunity, LabelledShard, RingMessage};
use super::{BackendConfig, CommStats, PhaseTiming, RunReport, Stopwatch, WorkerTiming};

/// `(receive from, send to)` for `worker` on a ring of `workers`.
pub fn ring_topology(workers: usize, worker: usize) -> (usize, usize) {
    ((worker + workers - 1) % workers, (worker + 1) % workers)
}

const NEIGHBOUR_GONE: &str = "ring neighbour exited";

/// A worker's two channel ends plus its traffic counters.
struct Port {
    me: usize,
    workers: usize,
    tx: SyncSender<RingMessage>,
    rx: Receiver<RingMessage>,
    timeout: Duration,
    timer: bool,
    messages: u64,
    bytes: u64,
    message_seconds: f64,
    phases: Vec<usize>,
}

impl Port {
    fn fail(&self, reason: impl Into<String>) -> Error {
        Error::Worker {
            worker: self.me,
            reason: reason.into(),
        }
    }

    /// Runs one circulation phase starting from this worker's own payload.
    /// `visit` sees every foreign payload once.
    fn circulate(&mut self, own: Vec<u8>, mut visit: impl FnMut(&[u8]) -> Result<()>) -> Result<()> {
        let mut current = own;
        let mut seen = 0;
        for step in 1..self.workers {
            let clock = Stopwatch::start(self.timer);
            let msg = RingMessage {
                sender: self.me as u32,
                hop: step as u32,
                payload: current,
            };
            self.messages += 1;
            self.bytes += msg.wire_len() as u64;
            self.tx.send(msg).map_err(|_| self.fail(NEIGHBOUR_GONE))?;
            let got = match self.rx.recv_timeout(self.timeout) {
                Ok(m) => m,
                Err(RecvTimeoutError::Timeout) => {
                    return Err(self.fail(format!("no message from predecessor within {:?}", self.timeout)))
                }
                Err(RecvTimeoutError::Disconnected) => return Err(self.fail(NEIGHBOUR_GONE)),
            };
            self.message_seconds += clock.seconds();

            let (from, _) = ring_topology(self.workers, self.me);
            let origin = wire::payload_owner(&got.payload)?;
            let expected = (self.me + self.workers - step) % self.workers;
            if got.sender as usize != from || got.hop as usize != step || origin != expected {
                return Err(self.fail(format!(
                    "step {step}: got shard of worker {origin} (hop {}, from {}), expected worker {expected}",
                    got.hop, got.sender
                )));
            }
            visit(&got.payload)?;
            seen += 1;
            current = got.payload;
        }
        self.phases.push(seen);
        Ok(())
    }
}

struct RingOutput<P> {
    parts: Vec<P>,
    timing: PhaseTiming,
    comm: CommStats,
}

/// Starts one thread per input, wires them into a ring and collects their
/// partial results in worker order.
fn run_ring<I: Send, P: Send>(
    cfg: &BackendConfig,
    setup_seconds: f64,
    inputs: Vec<I>,
    work: impl Fn(I, &mut Port) -> Result<P> + Sync,
) -> Result<RingOutput<P>> {
    let workers = inputs.len();
    let (mut senders, receivers): (Vec<_>, Vec<_>) = (0..workers)
        .map(|_| sync_channel(cfg.channel_capacity))
        .map(|(t, r)| (Some(t), r))
        .unzip();
    let mut ports = Vec::with_capacity(workers);
    for (me, rx) in receivers.into_iter().enumerate() {
        let (_, to) = ring_topology(workers, me);
        ports.push(Port {
            me,
            workers,
            tx: senders[to].take().unwrap(),
            rx,
            timeout: cfg.recv_timeout,
            timer: cfg.timer_enabled,
            messages: 0,
            bytes: 0,
            message_seconds: 0.0,
            phases: Vec::new(),
        });
    }

    let wall = Stopwatch::start(cfg.timer_enabled);
    let work = &work;
    let results: Vec<Result<(P, Port, f64)>> = std::thread::scope(|scope| {
        let handles: Vec<_> = inputs
            .into_iter()
            .zip(ports)
            .map(|(input, mut port)| {
                scope.spawn(move || {
                    let clock = Stopwatch::start(port.timer);
                    let part = work(input, &mut port)?;
                    Ok((part, port, clock.seconds()))
                })
            })
            .collect();
        handles
            .into_iter()
            .enumerate()
            .map(|(worker, h)| {
                h.join().unwrap_or_else(|_| {
                    Err(Error::Worker {
                        worker,
                        reason: "panicked".into(),
                    })
                })
            })
            .collect()
    });
    let total_seconds = wall.seconds();

    // A failing worker drops its channel ends, which makes its neighbours
    // fail too. Report the original failure.
    let is_knock_on = |e: &Error| matches!(e, Error::Worker { reason, .. } if reason == NEIGHBOUR_GONE);
    if results.iter().any(Result::is_err) {
        let mut errors: Vec<Error> = results.into_iter().filter_map(Result::err).collect();
        let root = errors.iter().position(|e| !is_knock_on(e)).unwrap_or(0);
        return Err(errors.swap_remove(root));
    }

    let mut out = RingOutput {
        parts: Vec::with_capacity(workers),
        timing: PhaseTiming::default(),
        comm: CommStats::default(),
    };
    let mut timings = Vec::with_capacity(workers);
    for (part, port, total) in results.into_iter().map(Result::unwrap) {
        out.parts.push(part);
        out.comm.messages += port.messages;
        out.comm.bytes += port.bytes;
        out.comm.foreign_shards.push(port.phases);
        timings.push(WorkerTiming {
            total_seconds: total,
            compute_seconds: (total - port.message_seconds).max(0.0),
            message_seconds: port.message_seconds,
        });
    }
    out.timing = PhaseTiming::from_workers(total_seconds, setup_seconds, timings);
    Ok(out)
}

fn shards(p: &Partition, workers: usize) -> Result<Vec<PartitionShard>> {
    (0..workers).map(|w| shard(p, workers, w)).collect()
}

pub(super) fn info(ground: &Partition, detected: &Partition, cfg: &BackendConfig) -> Result<RunReport<InfoMetrics>> {
    let setup = Stopwatch::start(cfg.timer_enabled);
    let inputs: Vec<_> = shards(ground, cfg.workers)?
        .into_iter()
        .zip(shards(detected, cfg.workers)?)
        .collect();
    let setup_seconds = setup.seconds();

    let universe = ground.universe();
    let out = run_ring(cfg, setup_seconds, inputs, |(own_g, own_d), port| {
        let index = OverlapIndex::new(&own_g.communities);
        let mut acc = InfoAccumulator::default();
        let mut cells = Vec::new();
        let mut add = |acc: &mut InfoAccumulator, d: &PartitionShard| {
            cells.clear();
            index.scan(&own_g.communities, &d.communities, |g, d, n| {
                cells.push((n, g.size() as u64, d.size() as u64))
            });
            acc.add_cells(cells.iter().copied(), universe);
        };
        add(&mut acc, &own_d);
        port.circulate(wire::encode_shard(&own_d), |bytes| {
            add(&mut acc, &wire::decode_shard(bytes)?);
            Ok(())
        })?;
        for c in &own_g.communities {
            acc.add_ground(c.size() as u64, universe);
        }
        for c in &own_d.communities {
            acc.add_detected(c.size() as u64, universe);
        }
        Ok(acc)
    })?;
    let mut total = InfoAccumulator::default();
    for part in &out.parts {
        total.merge(part);
    }
    Ok(RunReport {
        value: total.finish(universe)?,
        timing: out.timing,
        comm: out.comm,
    })
}

/// Two phases: detected shards circulate to settle the ground-truth maxima,
/// then ground-truth shards circulate to settle the detected maxima.
pub(super) fn matching(
    ground: &Partition,
    detected: &Partition,
    cfg: &BackendConfig,
) -> Result<RunReport<MatchingMetrics>> {
    let setup = Stopwatch::start(cfg.timer_enabled);
    let inputs: Vec<_> = shards(ground, cfg.workers)?
        .into_iter()
        .zip(shards(detected, cfg.workers)?)
        .collect();
    let setup_seconds = setup.seconds();

    let (ground_count, detected_count) = (ground.len(), detected.len());
    let out = run_ring(cfg, setup_seconds, inputs, |(own_g, own_d), port| {
        let mut m = MatchMaxima::new(ground_count, detected_count);

        let by_ground = OverlapIndex::new(&own_g.communities);
        by_ground.scan(&own_g.communities, &own_d.communities, |g, d, n| {
            m.observe(g, d, n, MatchSide::Ground)
        });
        port.circulate(wire::encode_shard(&own_d), |bytes| {
            let d = wire::decode_shard(bytes)?;
            by_ground.scan(&own_g.communities, &d.communities, |g, d, n| {
                m.observe(g, d, n, MatchSide::Ground)
            });
            Ok(())
        })?;
        drop(by_ground);

        let by_detected = OverlapIndex::new(&own_d.communities);
        by_detected.scan(&own_d.communities, &own_g.communities, |d, g, n| {
            m.observe(g, d, n, MatchSide::Detected)
        });
        port.circulate(wire::encode_shard(&own_g), |bytes| {
            let g = wire::decode_shard(bytes)?;
            by_detected.scan(&own_d.communities, &g.communities, |d, g, n| {
                m.observe(g, d, n, MatchSide::Detected)
            });
            Ok(())
        })?;

        Ok(m.partial(&own_g.communities, &own_d.communities))
    })?;
    let mut total = MatchingAccumulator::default();
    for part in &out.parts {
        total.merge(part);
    }
    Ok(RunReport {
        value: total.finish(ground.universe())?,
        timing: out.timing,
        comm: out.comm,
    })
}

/// Node records of one shard, flattened and sorted by ground-truth label.
struct Records {
    ground: Vec<u32>,
    detected: Vec<u32>,
}

impl Records {
    fn from_shard(shard: &LabelledShard) -> Self {
        let mut rows: Vec<(u32, u32)> = shard
            .communities
            .iter()
            .flat_map(|c| c.members.iter().map(move |&(_, d)| (c.id, d)))
            .collect();
        rows.sort_unstable();
        let (ground, detected) = rows.into_iter().unzip();
        Records { ground, detected }
    }
}

/// Groups the padded label vectors by ground-truth label and hands label `g`
/// to worker `g mod workers`.
fn labelled_shards(labels: &PairLabels, workers: usize) -> Vec<LabelledShard> {
    let mut groups: HashMap<u32, Vec<(u64, u32)>> = HashMap::new();
    for (node, (&g, &d)) in labels.ground().iter().zip(labels.detected()).enumerate() {
        groups.entry(g).or_default().push((node as u64, d));
    }
    let mut ids: Vec<u32> = groups.keys().copied().collect();
    ids.sort_unstable();
    let mut out: Vec<LabelledShard> = (0..workers)
        .map(|owner| LabelledShard {
            owner,
            workers,
            communities: Vec::new(),
        })
        .collect();
    for id in ids {
        let members = groups.remove(&id).unwrap_or_default();
        out[id as usize % workers]
            .communities
            .push(LabelledCommunity { id, members });
    }
    out
}

pub(super) fn pairs(ground: &Partition, detected: &Partition, cfg: &BackendConfig) -> Result<RunReport<PairCounts>> {
    let setup = Stopwatch::start(cfg.timer_enabled);
    let labels = PairLabels::new(&ground.to_node_map(), &detected.to_node_map())?;
    let inputs = labelled_shards(&labels, cfg.workers);
    drop(labels);
    let setup_seconds = setup.seconds();

    let out = run_ring(cfg, setup_seconds, inputs, |own, port| {
        let mine = Records::from_shard(&own);
        let mut counts = PairCounts::default();
        for i in 0..mine.ground.len() {
            counts += count_against(
                mine.ground[i],
                mine.detected[i],
                &mine.ground[i + 1..],
                &mine.detected[i + 1..],
            );
        }
        port.circulate(wire::encode_labelled(&own), |bytes| {
            let theirs = Records::from_shard(&wire::decode_labelled(bytes)?);
            for (&g, &d) in mine.ground.iter().zip(&mine.detected) {
                // Labels never repeat across workers, so this skips exactly
                // the records whose label is below ours.
                let start = theirs.ground.partition_point(|&x| x < g);
                counts += count_against(g, d, &theirs.ground[start..], &theirs.detected[start..]);
            }
            Ok(())
        })?;
        Ok(counts)
    })?;
    Ok(RunReport {
        value: out.parts.into_iter().fold(PairCounts::default(), |a, b| a + b),
        timing: out.timing,
        comm: out.comm,
    })
}

/// The coordinator cuts each worker a local subgraph holding its communities
/// and their one-hop neighbourhood. Every edge a worker needs is then local,
/// so no messages are exchanged.
pub(super) fn intrinsic(
    network: &Network,
    partition: &Partition,
    cfg: &BackendConfig,
) -> Result<RunReport<IntrinsicReport>> {
    let setup = Stopwatch::start(cfg.timer_enabled);
    let assignment = NodeAssignment::new(network, partition)?;
    let mut inputs = Vec::with_capacity(cfg.workers);
    for w in 0..cfg.workers {
        let own = shard(partition, cfg.workers, w)?;
        let local = local_subgraph(network, &own)?;
        let local_assignment = assignment.restrict(network, &local)?;
        inputs.push((own, local, local_assignment));
    }
    let unassigned = assignment.unassigned();
    drop(assignment);
    let setup_seconds = setup.seconds();

    let total_edges = network.edge_count();
    let out = run_ring(cfg, setup_seconds, inputs, |(own, local, local_assignment), _port| {
        let stats = stats_for(&local, &local_assignment, &own.communities)?;
        Ok(IntrinsicPartial::from_stats(&stats, total_edges))
    })?;
    Ok(RunReport {
        value: IntrinsicReport::assemble(out.parts, total_edges, unassigned)?,
        timing: out.timing,
        comm: out.comm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Backend;

    #[test]
    fn topology() {
        assert_eq!(ring_topology(4, 0), (3, 1));
        assert_eq!(ring_topology(4, 3), (2, 0));
        assert_eq!(ring_topology(1, 0), (0, 0));
        for w in 1..8 {
            for p in 0..w {
                let (from, to) = ring_topology(w, p);
                assert_eq!(ring_topology(w, to).0, p);
                assert_eq!(ring_topology(w, from).1, p);
            }
        }
    }

    fn pair_of_partitions(n: u64) -> (Partition, Partition) {
        let c = Partition::new(
            (0..n).collect::<Vec<_>>().chunks(7).map(<[u64]>::to_vec).collect(),
            n as usize,
        )
        .unwrap();
        let d = Partition::new(
            (0..5).map(|r| (0..n).filter(|x| x % 5 == r).collect()).collect(),
            n as usize,
        )
        .unwrap();
        (c, d)
    }

    #[test]
    fn every_worker_sees_every_foreign_shard_once() {
        let (c, d) = pair_of_partitions(200);
        for w in 1..=6 {
            let cfg = BackendConfig::new(Backend::MessagePassing, w);
            let info = info(&c, &d, &cfg).unwrap();
            assert_eq!(info.comm.foreign_shards, vec![vec![w - 1]; w]);
            assert_eq!(info.comm.messages, (w * (w - 1)) as u64);
            let m = matching(&c, &d, &cfg).unwrap();
            assert_eq!(m.comm.foreign_shards, vec![vec![w - 1, w - 1]; w]);
            let p = pairs(&c, &d, &cfg).unwrap();
            assert_eq!(p.comm.foreign_shards, vec![vec![w - 1]; w]);
        }
    }

    #[test]
    fn pair_counts_match_striped_enumeration() {
        let (c, d) = pair_of_partitions(301);
        let labels = PairLabels::new(&c.to_node_map(), &d.to_node_map()).unwrap();
        let expected = labels.count_striped(0, 1);
        for w in 1..=7 {
            let got = pairs(&c, &d, &BackendConfig::new(Backend::MessagePassing, w))
                .unwrap()
                .value;
            assert_eq!(got, expected, "{w} workers");
        }
    }

    #[test]
    fn bytes_follow_the_wire_layout() {
        let (c, d) = pair_of_partitions(50);
        let cfg = BackendConfig::new(Backend::MessagePassing, 2);
        let r = info(&c, &d, &cfg).unwrap();
        // Each worker forwards its detected shard once.
        let expected: usize = (0..2)
            .map(|w| 8 + wire::encode_shard(&shard(&d, 2, w).unwrap()).len())
            .sum();
        assert_eq!(r.comm.bytes, expected as u64);
    }

    #[test]
    fn a_failing_worker_is_reported_not_hung() {
        let mut cfg = BackendConfig::new(Backend::MessagePassing, 4);
        cfg.recv_timeout = Duration::from_secs(5);
        let err = run_ring(&cfg, 0.0, vec![0usize, 1, 2, 3], |i, port| {
            if i == 2 {
                return Err(Error::Degenerate("boom"));
            }
            port.circulate(vec![0, 0, 0, 0, i as u8, 0, 0, 0, 4, 0, 0, 0, 0, 0, 0, 0], |_| Ok(()))
        })
        .err()
        .unwrap();
        assert!(matches!(err, Error::Degenerate("boom")), "{err:?}");

        let err = run_ring(&cfg, 0.0, vec![0usize, 1], |i, port| {
            if i == 1 {
                panic!("worker crashed");
            }
            port.circulate(vec![0; 16], |_| Ok(()))
        })
        .err()
        .unwrap();
        assert!(matches!(err, Error::Worker { worker: 1, .. }), "{err:?}");
    }

    #[test]
    fn misrouted_shard_is_detected() {
        let cfg = BackendConfig::new(Backend::MessagePassing, 3);
        // Every worker claims to be worker 0.
        let err = run_ring(&cfg, 0.0, vec![(); 3], |_, port| {
            port.circulate(vec![0, 0, 0, 0, 0, 0, 0, 0, 3, 0, 0, 0, 0, 0, 0, 0], |_| Ok(()))
        })
        .err()
        .unwrap();
        assert!(matches!(err, Error::Worker { .. }), "{err:?}");
    }
}
