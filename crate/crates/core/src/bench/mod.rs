//! Scaling studies: run a metric family at several worker counts, take the
//! median of repeated timings, and derive speedup and efficiency.
//!
//! Inputs are built before any clock starts, so loading and generation never
//! count. Every run's metric values must agree with the first run's before
//! any timing is reported.

mod generator;

use std::fmt;
use std::io::Write;
use std::str::FromStr;

pub use generator::{generate_network, perturb_partition, GeneratorParams};

use crate::engine::{
    run_info_metrics, run_intrinsic_metrics, run_matching_metrics, run_pair_metrics, Backend, BackendConfig,
    PairOutcome, PhaseTiming,
};
use crate::error::{Error, Result};
use crate::graph::Network;
use crate::metrics::info::InfoMetrics;
use crate::metrics::intrinsic::IntrinsicReport;
use crate::metrics::matching::MatchingMetrics;
use crate::partition::Partition;

/// `(T1 / Tp, T1 / (Tp · p))`.
pub fn speedup_efficiency(t1: f64, tp: f64, workers: usize) -> Result<(f64, f64)> {
    if !(t1 > 0.0 && tp > 0.0) || workers == 0 {
        return Err(Error::Degenerate(
            "speedup needs positive times and at least one worker",
        ));
    }
    let speedup = t1 / tp;
    Ok((speedup, speedup / workers as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Info,
    Matching,
    Pair,
    /// All seven ground-truth comparison metrics.
    Compare,
    Intrinsic,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Info => "info",
            Family::Matching => "matching",
            Family::Pair => "pair",
            Family::Compare => "compare",
            Family::Intrinsic => "intrinsic",
        }
    }

    pub fn needs_network(&self) -> bool {
        *self == Family::Intrinsic
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "info" => Ok(Family::Info),
            "matching" => Ok(Family::Matching),
            "pair" => Ok(Family::Pair),
            "compare" => Ok(Family::Compare),
            "intrinsic" => Ok(Family::Intrinsic),
            other => Err(Error::Workers(format!("unknown metric family {other:?}"))),
        }
    }
}

/// Everything a study might need, loaded or generated up front.
#[derive(Debug, Clone)]
pub struct StudyInputs {
    pub network: Option<Network>,
    pub ground: Partition,
    pub detected: Option<Partition>,
}

impl StudyInputs {
    /// A generated network, its planted partition, and a detected partition
    /// with `perturbation` of the nodes moved.
    pub fn generated(params: &GeneratorParams, perturbation: f64) -> Result<Self> {
        let (network, ground) = generate_network(params)?;
        let detected = perturb_partition(&ground, perturbation, params.seed.wrapping_add(1))?;
        Ok(StudyInputs {
            network: Some(network),
            ground,
            detected: Some(detected),
        })
    }
}

/// Metric values of one run, kept to check agreement across runs.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilyValue {
    Info(InfoMetrics),
    Matching(MatchingMetrics),
    Pair(PairOutcome),
    Compare(InfoMetrics, MatchingMetrics, PairOutcome),
    Intrinsic(Box<IntrinsicReport>),
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    a == b || (a - b).abs() <= rel * a.abs().max(b.abs())
}

impl FamilyValue {
    /// Pair counts must match exactly, everything else within `rel`.
    pub fn agrees_with(&self, other: &FamilyValue, rel: f64) -> bool {
        let info = |a: &InfoMetrics, b: &InfoMetrics| close(a.vi, b.vi, rel) && close(a.nmi, b.nmi, rel);
        let matching =
            |a: &MatchingMetrics, b: &MatchingMetrics| close(a.f_measure, b.f_measure, rel) && close(a.nvd, b.nvd, rel);
        let pair = |a: &PairOutcome, b: &PairOutcome| a.counts == b.counts;
        match (self, other) {
            (FamilyValue::Info(a), FamilyValue::Info(b)) => info(a, b),
            (FamilyValue::Matching(a), FamilyValue::Matching(b)) => matching(a, b),
            (FamilyValue::Pair(a), FamilyValue::Pair(b)) => pair(a, b),
            (FamilyValue::Compare(a1, a2, a3), FamilyValue::Compare(b1, b2, b3)) => {
                info(a1, b1) && matching(a2, b2) && pair(a3, b3)
            }
            (FamilyValue::Intrinsic(a), FamilyValue::Intrinsic(b)) => {
                close(a.modularity, b.modularity, rel)
                    && close(a.modularity_density, b.modularity_density, rel)
                    && a.rows.len() == b.rows.len()
                    && a.rows.iter().zip(&b.rows).all(|(x, y)| {
                        x.id == y.id
                            && x.intra_edges == y.intra_edges
                            && x.inter_edges == y.inter_edges
                            && close(x.conductance, y.conductance, rel)
                    })
            }
            _ => false,
        }
    }
}

/// Tolerance for floating-point agreement between worker counts.
pub const AGREEMENT_TOLERANCE: f64 = 1e-9;

/// Runs one family once and returns its value plus summed timings.
pub fn run_family(family: Family, inputs: &StudyInputs, cfg: &BackendConfig) -> Result<(FamilyValue, PhaseTiming)> {
    let detected = || inputs.detected.as_ref().ok_or(Error::Empty("detected partition"));
    let mut timing = PhaseTiming::default();
    let mut add = |t: &PhaseTiming| {
        timing.total_seconds += t.total_seconds;
        timing.compute_seconds += t.compute_seconds;
        timing.message_seconds += t.message_seconds;
        timing.setup_seconds += t.setup_seconds;
    };
    let value = match family {
        Family::Info => {
            let r = run_info_metrics(&inputs.ground, detected()?, cfg)?;
            add(&r.timing);
            FamilyValue::Info(r.value)
        }
        Family::Matching => {
            let r = run_matching_metrics(&inputs.ground, detected()?, cfg)?;
            add(&r.timing);
            FamilyValue::Matching(r.value)
        }
        Family::Pair => {
            let r = run_pair_metrics(&inputs.ground, detected()?, cfg)?;
            add(&r.timing);
            FamilyValue::Pair(r.value)
        }
        Family::Compare => {
            let d = detected()?;
            let i = run_info_metrics(&inputs.ground, d, cfg)?;
            add(&i.timing);
            let m = run_matching_metrics(&inputs.ground, d, cfg)?;
            add(&m.timing);
            let p = run_pair_metrics(&inputs.ground, d, cfg)?;
            add(&p.timing);
            FamilyValue::Compare(i.value, m.value, p.value)
        }
        Family::Intrinsic => {
            let network = inputs.network.as_ref().ok_or(Error::Empty("network"))?;
            let r = run_intrinsic_metrics(network, &inputs.ground, cfg)?;
            add(&r.timing);
            FamilyValue::Intrinsic(Box::new(r.value))
        }
    };
    Ok((value, timing))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingRow {
    pub family: Family,
    pub backend: Backend,
    pub workers: usize,
    pub total_seconds: f64,
    pub compute_seconds: f64,
    pub message_seconds: f64,
    pub speedup: f64,
    pub efficiency: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingResult {
    pub rows: Vec<ScalingRow>,
    /// Every repetition's timing, per worker count, in run order.
    pub raw: Vec<Vec<PhaseTiming>>,
}

pub const CSV_HEADER: &str = "family,backend,workers,total_s,compute_s,message_s,speedup,efficiency";

impl ScalingResult {
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.family,
                r.backend.name(),
                r.workers,
                r.total_seconds,
                r.compute_seconds,
                r.message_seconds,
                r.speedup,
                r.efficiency
            )?;
        }
        out.flush()?;
        Ok(())
    }
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n == 0 {
        return 0.0;
    }
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub family: Family,
    pub backend: Backend,
    /// Ascending, starting at 1.
    pub workers: Vec<usize>,
    /// At least 3.
    pub repetitions: usize,
}

impl StudyConfig {
    pub fn new(family: Family, backend: Backend, workers: Vec<usize>) -> Self {
        StudyConfig {
            family,
            backend,
            workers,
            repetitions: 3,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.workers.first() != Some(&1) || self.workers.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Workers(format!(
                "worker counts must ascend strictly from 1, got {:?}",
                self.workers
            )));
        }
        if self.backend == Backend::Sequential && self.workers != [1] {
            return Err(Error::Workers(
                "the sequential backend only runs with one worker".into(),
            ));
        }
        if self.repetitions < 3 {
            return Err(Error::Workers(format!(
                "need at least 3 repetitions, got {}",
                self.repetitions
            )));
        }
        Ok(())
    }
}

/// Runs the study one configuration at a time. Aborts with
/// [`Error::Divergence`] as soon as a run's values disagree with the first.
pub fn run_scaling_study(inputs: &StudyInputs, study: &StudyConfig) -> Result<ScalingResult> {
    study.validate()?;
    let mut reference: Option<FamilyValue> = None;
    let mut result = ScalingResult {
        rows: Vec::with_capacity(study.workers.len()),
        raw: Vec::with_capacity(study.workers.len()),
    };
    for &workers in &study.workers {
        let cfg = BackendConfig::new(study.backend, workers);
        let mut runs = Vec::with_capacity(study.repetitions);
        for rep in 0..study.repetitions {
            let (value, timing) = run_family(study.family, inputs, &cfg)?;
            match &reference {
                None => reference = Some(value),
                Some(r) if !r.agrees_with(&value, AGREEMENT_TOLERANCE) => {
                    return Err(Error::Divergence(format!(
                        "{} on {} with {workers} workers (repetition {rep}) disagrees with the first run: \
                         {value:?} vs {r:?}",
                        study.family,
                        study.backend.name()
                    )));
                }
                Some(_) => {}
            }
            log::debug!(
                "{} {} w={workers} rep={rep}: {:.4}s",
                study.family,
                study.backend.name(),
                timing.total_seconds
            );
            runs.push(timing);
        }
        let med = |f: fn(&PhaseTiming) -> f64| median(&mut runs.iter().map(f).collect::<Vec<_>>());
        result.rows.push(ScalingRow {
            family: study.family,
            backend: study.backend,
            workers,
            total_seconds: med(|t| t.total_seconds),
            compute_seconds: med(|t| t.compute_seconds),
            message_seconds: med(|t| t.message_seconds),
            speedup: 1.0,
            efficiency: 1.0,
        });
        result.raw.push(runs);
    }
    let t1 = result.rows[0].total_seconds;
    for row in &mut result.rows {
        (row.speedup, row.efficiency) = speedup_efficiency(t1, row.total_seconds, row.workers)?;
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn speedup_examples() {
        assert_eq!(speedup_efficiency(100.0, 25.0, 8).unwrap(), (4.0, 0.5));
        assert_eq!(speedup_efficiency(3.7, 3.7, 1).unwrap(), (1.0, 1.0));
        let (s, e) = speedup_efficiency(10.0, 2.0, 4).unwrap();
        assert!(s == 5.0 && e > 1.0);
        assert!(speedup_efficiency(0.0, 1.0, 1).is_err());
        assert!(speedup_efficiency(1.0, 1.0, 0).is_err());
    }

    #[test]
    fn medians() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 3.0, 2.0]), 2.5);
    }

    fn small_inputs() -> StudyInputs {
        StudyInputs::generated(&GeneratorParams::with_nodes(600, 5), 0.2).unwrap()
    }

    #[test]
    fn sequential_study_has_one_unit_row() {
        let inputs = small_inputs();
        let r = run_scaling_study(
            &inputs,
            &StudyConfig::new(Family::Compare, Backend::Sequential, vec![1]),
        )
        .unwrap();
        assert_eq!(r.rows.len(), 1);
        assert_eq!((r.rows[0].speedup, r.rows[0].efficiency), (1.0, 1.0));
        assert!(r.rows[0].total_seconds > 0.0);
    }

    #[test]
    fn rows_recompute_from_raw_timings() {
        let inputs = small_inputs();
        for backend in [Backend::SharedMemory, Backend::MessagePassing] {
            for family in [Family::Compare, Family::Intrinsic] {
                let r = run_scaling_study(&inputs, &StudyConfig::new(family, backend, vec![1, 2, 3])).unwrap();
                let medians: Vec<f64> = r
                    .raw
                    .iter()
                    .map(|runs| median(&mut runs.iter().map(|t| t.total_seconds).collect::<Vec<_>>()))
                    .collect();
                for (row, &m) in r.rows.iter().zip(&medians) {
                    assert_eq!(row.total_seconds, m);
                    let (s, e) = speedup_efficiency(medians[0], m, row.workers).unwrap();
                    assert_eq!((row.speedup, row.efficiency), (s, e));
                    assert!(row.total_seconds > 0.0);
                }
                if family == Family::Intrinsic {
                    assert!(r.rows.iter().all(|row| row.message_seconds == 0.0));
                }
            }
        }
    }

    #[test]
    fn worker_lists_are_checked() {
        let inputs = small_inputs();
        for bad in [vec![2, 4], vec![1, 4, 2], vec![1, 1], vec![]] {
            let study = StudyConfig::new(Family::Info, Backend::SharedMemory, bad);
            assert!(matches!(run_scaling_study(&inputs, &study), Err(Error::Workers(_))));
        }
        let mut study = StudyConfig::new(Family::Info, Backend::SharedMemory, vec![1]);
        study.repetitions = 2;
        assert!(run_scaling_study(&inputs, &study).is_err());
    }

    #[test]
    fn disagreement_is_detected() {
        let a = FamilyValue::Info(InfoMetrics { vi: 1.0, nmi: 0.5 });
        let b = FamilyValue::Info(InfoMetrics {
            vi: 1.0 + 1e-12,
            nmi: 0.5,
        });
        let c = FamilyValue::Info(InfoMetrics {
            vi: 1.0 + 1e-6,
            nmi: 0.5,
        });
        assert!(a.agrees_with(&b, AGREEMENT_TOLERANCE));
        assert!(!a.agrees_with(&c, AGREEMENT_TOLERANCE));
        assert!(!a.agrees_with(
            &FamilyValue::Matching(MatchingMetrics {
                f_measure: 1.0,
                nvd: 0.0
            }),
            1.0
        ));
    }

    #[test]
    fn csv_schema() {
        let r = ScalingResult {
            rows: vec![ScalingRow {
                family: Family::Pair,
                backend: Backend::SharedMemory,
                workers: 4,
                total_seconds: 2.5,
                compute_seconds: 2.0,
                message_seconds: 0.0,
                speedup: 4.0,
                efficiency: 1.0,
            }],
            raw: vec![],
        };
        let mut out = Vec::new();
        r.write_csv(&mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "family,backend,workers,total_s,compute_s,message_s,speedup,efficiency\npair,shm,4,2.5,2,0,4,1\n"
        );
    }
}
