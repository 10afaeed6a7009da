//! Execution backends for the four metric families.
//!
//! * [`Backend::Sequential`] evaluates the formulas directly from a
//!   contingency table (pair counts via the fast path).
//! * [`Backend::SharedMemory`] runs worker threads over shared read-only
//!   inputs. Information and matching metrics split by community
//!   (`id mod workers`), pair counting splits by node (`i mod workers`), and
//!   intrinsic metrics split by community.
//! * [`Backend::MessagePassing`] runs isolated workers that own only their
//!   shards and circulate them around a ring of bounded channels; see
//!   [`ring`].
//!
//! Partial results are always reduced in worker-id order, so a given worker
//! count reproduces the same floating-point result on every run.

pub mod ring;
mod shm;
pub mod wire;

use std::time::Duration;

use crate::error::{Error, Result};
use crate::graph::Network;
use crate::metrics::contingency::build_contingency;
use crate::metrics::info::{InfoAccumulator, InfoMetrics};
use crate::metrics::intrinsic::{intrinsic_report, IntrinsicReport};
use crate::metrics::matching::{matching_metrics, MatchingMetrics};
use crate::metrics::pair::{pair_counts_fast, pair_metrics, PairCounts, PairMetrics};
use crate::partition::Partition;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    Sequential,
    SharedMemory,
    MessagePassing,
}

impl Backend {
    pub fn name(&self) -> &'static str {
        match self {
            Backend::Sequential => "seq",
            Backend::SharedMemory => "shm",
            Backend::MessagePassing => "ring",
        }
    }
}

impl std::str::FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "seq" | "sequential" => Ok(Backend::Sequential),
            "shm" | "shared-memory" => Ok(Backend::SharedMemory),
            "ring" | "message-passing" => Ok(Backend::MessagePassing),
            other => Err(Error::Workers(format!("unknown backend {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BackendConfig {
    pub backend: Backend,
    pub workers: usize,
    pub timer_enabled: bool,
    /// Messages a ring channel buffers. Must be at least 1: every worker
    /// sends before it receives.
    pub channel_capacity: usize,
    /// How long a ring worker waits for its predecessor before giving up.
    pub recv_timeout: Duration,
}

impl BackendConfig {
    pub fn new(backend: Backend, workers: usize) -> Self {
        BackendConfig {
            backend,
            workers,
            timer_enabled: true,
            channel_capacity: 1,
            recv_timeout: Duration::from_secs(600),
        }
    }

    pub fn sequential() -> Self {
        Self::new(Backend::Sequential, 1)
    }

    fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(Error::Workers("worker count must be positive".into()));
        }
        if self.workers > u32::MAX as usize {
            return Err(Error::Workers("too many workers".into()));
        }
        if self.backend == Backend::MessagePassing && self.channel_capacity == 0 {
            return Err(Error::Workers(
                "ring channels need capacity of at least one message".into(),
            ));
        }
        Ok(())
    }

    /// Sequential runs always use one lane.
    pub fn effective_workers(&self) -> usize {
        match self.backend {
            Backend::Sequential => 1,
            _ => self.workers,
        }
    }
}

/// Wall-clock breakdown of one worker.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct WorkerTiming {
    pub total_seconds: f64,
    pub compute_seconds: f64,
    pub message_seconds: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PhaseTiming {
    /// Coordinator wall clock for the parallel section, input distribution
    /// excluded.
    pub total_seconds: f64,
    /// Max over workers.
    pub compute_seconds: f64,
    /// Max over workers.
    pub message_seconds: f64,
    /// Time spent handing each worker its inputs (shards, local subgraphs).
    pub setup_seconds: f64,
    pub workers: Vec<WorkerTiming>,
}

impl PhaseTiming {
    fn from_workers(total_seconds: f64, setup_seconds: f64, workers: Vec<WorkerTiming>) -> Self {
        let max = |f: fn(&WorkerTiming) -> f64| workers.iter().map(f).fold(0.0, f64::max);
        PhaseTiming {
            total_seconds,
            compute_seconds: max(|w| w.compute_seconds),
            message_seconds: max(|w| w.message_seconds),
            setup_seconds,
            workers,
        }
    }
}

/// Ring traffic. All zeros for backends that do not pass messages.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CommStats {
    pub messages: u64,
    pub bytes: u64,
    /// Per worker, per circulation phase: how many foreign shards it processed.
    pub foreign_shards: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport<T> {
    pub value: T,
    pub timing: PhaseTiming,
    pub comm: CommStats,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairOutcome {
    pub counts: PairCounts,
    pub metrics: PairMetrics,
}

/// Times a span, or does nothing when timing is off.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Stopwatch(Option<std::time::Instant>);

impl Stopwatch {
    pub(crate) fn start(enabled: bool) -> Self {
        Stopwatch(enabled.then(std::time::Instant::now))
    }

    pub(crate) fn seconds(&self) -> f64 {
        self.0.map_or(0.0, |t| t.elapsed().as_secs_f64())
    }
}

fn same_universe(c: &Partition, d: &Partition) -> Result<()> {
    if c.universe() != d.universe() {
        return Err(Error::UniverseMismatch(c.universe(), d.universe()));
    }
    if c.universe() == 0 {
        return Err(Error::EmptyUniverse);
    }
    Ok(())
}

fn sequential<T>(cfg: &BackendConfig, f: impl FnOnce() -> Result<T>) -> Result<RunReport<T>> {
    let clock = Stopwatch::start(cfg.timer_enabled);
    let value = f()?;
    let t = clock.seconds();
    Ok(RunReport {
        value,
        timing: PhaseTiming::from_workers(
            t,
            0.0,
            vec![WorkerTiming {
                total_seconds: t,
                compute_seconds: t,
                message_seconds: 0.0,
            }],
        ),
        comm: CommStats::default(),
    })
}

/// VI and NMI.
pub fn run_info_metrics(
    ground: &Partition,
    detected: &Partition,
    cfg: &BackendConfig,
) -> Result<RunReport<InfoMetrics>> {
    cfg.validate()?;
    same_universe(ground, detected)?;
    match cfg.backend {
        Backend::Sequential => sequential(cfg, || {
            let t = build_contingency(ground, detected)?;
            InfoAccumulator::from_table(&t).finish(t.universe())
        }),
        Backend::SharedMemory => shm::info(ground, detected, cfg),
        Backend::MessagePassing => ring::info(ground, detected, cfg),
    }
}

/// F-measure and NVD.
pub fn run_matching_metrics(
    ground: &Partition,
    detected: &Partition,
    cfg: &BackendConfig,
) -> Result<RunReport<MatchingMetrics>> {
    cfg.validate()?;
    same_universe(ground, detected)?;
    match cfg.backend {
        Backend::Sequential => sequential(cfg, || matching_metrics(&build_contingency(ground, detected)?)),
        Backend::SharedMemory => shm::matching(ground, detected, cfg),
        Backend::MessagePassing => ring::matching(ground, detected, cfg),
    }
}

/// Pair counts plus RI, ARI and JI. The parallel backends enumerate node
/// pairs; the sequential backend uses the contingency fast path.
pub fn run_pair_metrics(
    ground: &Partition,
    detected: &Partition,
    cfg: &BackendConfig,
) -> Result<RunReport<PairOutcome>> {
    cfg.validate()?;
    same_universe(ground, detected)?;
    let report = match cfg.backend {
        Backend::Sequential => sequential(cfg, || Ok(pair_counts_fast(&build_contingency(ground, detected)?)))?,
        Backend::SharedMemory => shm::pairs(ground, detected, cfg)?,
        Backend::MessagePassing => ring::pairs(ground, detected, cfg)?,
    };
    let metrics = pair_metrics(&report.value)?;
    Ok(RunReport {
        value: PairOutcome {
            counts: report.value,
            metrics,
        },
        timing: report.timing,
        comm: report.comm,
    })
}

/// Modularity, modularity density and the per-community measures.
pub fn run_intrinsic_metrics(
    network: &Network,
    partition: &Partition,
    cfg: &BackendConfig,
) -> Result<RunReport<IntrinsicReport>> {
    cfg.validate()?;
    if network.edge_count() == 0 {
        return Err(Error::NoEdges);
    }
    match cfg.backend {
        Backend::Sequential => sequential(cfg, || intrinsic_report(network, partition)),
        Backend::SharedMemory => shm::intrinsic(network, partition, cfg),
        Backend::MessagePassing => ring::intrinsic(network, partition, cfg),
    }
}

/// Runs `work(worker)` on `workers` scoped threads and returns the results in
/// worker order. A panicking worker becomes an error.
pub(crate) fn fan_out<T: Send>(workers: usize, work: impl Fn(usize) -> Result<T> + Sync) -> Result<Vec<T>> {
    let work = &work;
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers).map(|w| scope.spawn(move || work(w))).collect();
        let mut out = Vec::with_capacity(workers);
        let mut first_err = None;
        for (w, h) in handles.into_iter().enumerate() {
            match h.join() {
                Ok(Ok(v)) => out.push(v),
                Ok(Err(e)) => {
                    first_err.get_or_insert(e);
                }
                Err(_) => {
                    first_err.get_or_insert(Error::Worker {
                        worker: w,
                        reason: "panicked".into(),
                    });
                }
            }
        }
        match first_err {
            Some(e) => Err(e),
            None => Ok(out),
        }
    })
}
