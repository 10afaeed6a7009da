//! Browser bindings. Every export returns a JSON string; failures come back
//! as `{"error": "..."}` so the page never has to catch.
//!
//! The engine backends need threads and a clock, neither of which exists on
//! wasm32-unknown-unknown, so everything here calls the sequential kernels.

use std::collections::HashSet;

use commeval::bench::{generate_network, perturb_partition, GeneratorParams};
use commeval::metrics::{
    build_contingency, info_metrics, intrinsic_report, matching_metrics, pair_counts_fast, pair_metrics,
};
use commeval::{load_communities, Network, Partition};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Serialize, Debug, PartialEq)]
pub struct Comparison {
    pub vi: f64,
    pub nmi: f64,
    pub f_measure: f64,
    pub nvd: f64,
    pub ri: f64,
    pub ari: f64,
    pub ji: f64,
}

#[derive(Serialize)]
struct Quality {
    modularity: f64,
    modularity_density: f64,
    mean_conductance: f64,
    mean_intra_density: f64,
}

#[derive(Serialize)]
struct Row {
    id: u32,
    size: u64,
    intra_edges: u64,
    inter_edges: u64,
    intra_density: f64,
    conductance: f64,
}

#[derive(Serialize)]
struct Generated {
    nodes: usize,
    edges: u64,
    communities: usize,
    detected_communities: usize,
    ground: Quality,
    detected: Quality,
    comparison: Comparison,
    rows: Vec<Row>,
}

#[derive(Serialize)]
struct CurvePoint {
    fraction: f64,
    #[serde(flatten)]
    metrics: Comparison,
}

fn to_json<T: Serialize>(r: commeval::Result<T>) -> String {
    match r {
        Ok(v) => serde_json::to_string(&v).unwrap_or_else(|e| error_json(&e.to_string())),
        Err(e) => error_json(&e.to_string()),
    }
}

fn error_json(msg: &str) -> String {
    serde_json::json!({ "error": msg }).to_string()
}

pub fn compare(ground: &Partition, detected: &Partition) -> commeval::Result<Comparison> {
    let table = build_contingency(ground, detected)?;
    let info = info_metrics(&table)?;
    let matching = matching_metrics(&table)?;
    let pairs = pair_metrics(&pair_counts_fast(&table))?;
    Ok(Comparison {
        vi: info.vi,
        nmi: info.nmi,
        f_measure: matching.f_measure,
        nvd: matching.nvd,
        ri: pairs.ri,
        ari: pairs.ari,
        ji: pairs.ji,
    })
}

fn quality(network: &Network, partition: &Partition) -> commeval::Result<(Quality, Vec<Row>)> {
    let report = intrinsic_report(network, partition)?;
    let rows = report
        .rows
        .iter()
        .map(|r| Row {
            id: r.id,
            size: r.size,
            intra_edges: r.intra_edges,
            inter_edges: r.inter_edges,
            intra_density: r.intra_density,
            conductance: r.conductance,
        })
        .collect();
    let q = Quality {
        modularity: report.modularity,
        modularity_density: report.modularity_density,
        mean_conductance: report.mean.conductance,
        mean_intra_density: report.mean.intra_density,
    };
    Ok((q, rows))
}

fn params(nodes: u32, mixing: f64, seed: u32) -> GeneratorParams {
    GeneratorParams {
        mixing,
        ..GeneratorParams::with_nodes(nodes as usize, seed.into())
    }
}

/// Generate a planted-partition network, move `perturb` of its nodes to other
/// communities, and score both partitions.
#[wasm_bindgen]
pub fn generate_and_score(nodes: u32, mixing: f64, perturb: f64, seed: u32) -> String {
    to_json((|| {
        let (network, ground) = generate_network(&params(nodes, mixing, seed))?;
        let detected = perturb_partition(&ground, perturb, u64::from(seed) + 1)?;
        let (ground_quality, rows) = quality(&network, &ground)?;
        let (detected_quality, _) = quality(&network, &detected)?;
        Ok(Generated {
            nodes: network.node_count(),
            edges: network.edge_count(),
            communities: ground.len(),
            detected_communities: detected.len(),
            ground: ground_quality,
            detected: detected_quality,
            comparison: compare(&ground, &detected)?,
            rows,
        })
    })())
}

/// The seven comparison metrics as the perturbed share grows from 0 to 1.
#[wasm_bindgen]
pub fn perturbation_curve(nodes: u32, mixing: f64, seed: u32, steps: u32) -> String {
    to_json((|| {
        let (_, ground) = generate_network(&params(nodes, mixing, seed))?;
        let steps = steps.max(1);
        (0..=steps)
            .map(|i| {
                let fraction = f64::from(i) / f64::from(steps);
                let detected = perturb_partition(&ground, fraction, u64::from(seed) + 1)?;
                Ok(CurvePoint {
                    fraction,
                    metrics: compare(&ground, &detected)?,
                })
            })
            .collect::<commeval::Result<Vec<_>>>()
    })())
}

/// Compare two partitions typed as text, one community per line. The node
/// count is the number of distinct ids in the two texts.
#[wasm_bindgen]
pub fn compare_text(ground: &str, detected: &str) -> String {
    to_json((|| {
        let g = load_communities(ground.as_bytes(), usize::MAX)?;
        let d = load_communities(detected.as_bytes(), usize::MAX)?;
        let universe = g
            .communities()
            .chain(d.communities())
            .flatten()
            .collect::<HashSet<_>>()
            .len();
        compare(&g.with_universe(universe)?, &d.with_universe(universe)?)
    })())
}
