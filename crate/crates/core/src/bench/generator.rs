//! Planted-partition benchmark networks.
//!
//! An approximation of LFR-style benchmarks: community sizes are uniform in a
//! range rather than power-law, and degrees follow a truncated exponential
//! on `[avg_degree / 2, max_degree]` whose rate is solved so the mean is
//! `avg_degree`. Each community gets `round(μ · K)` external stubs out of its
//! total degree `K`, spread over its members in proportion to degree; the
//! remaining stubs are paired inside the community and the external ones
//! across communities, both by configuration-model matching. Stubs that
//! cannot be paired without a self-loop or duplicate edge after a few
//! reshuffles are dropped, which loses a few tenths of a percent of the
//! degree.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Network;
use crate::partition::Partition;

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorParams {
    pub nodes: usize,
    pub avg_degree: f64,
    pub max_degree: usize,
    /// Fraction of each node's edges that leave its community.
    pub mixing: f64,
    /// Inclusive bounds on community size.
    pub community_sizes: (usize, usize),
    pub seed: u64,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            nodes: 1000,
            avg_degree: 15.0,
            max_degree: 50,
            mixing: 0.3,
            community_sizes: (50, 150),
            seed: 42,
        }
    }
}

impl GeneratorParams {
    pub fn with_nodes(nodes: usize, seed: u64) -> Self {
        GeneratorParams {
            nodes,
            seed,
            ..Default::default()
        }
    }

    fn min_degree(&self) -> f64 {
        self.avg_degree / 2.0
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Infeasible(msg));
        if !(0.0..=1.0).contains(&self.mixing) {
            return bad(format!("mixing {} outside [0, 1]", self.mixing));
        }
        if self.avg_degree.is_nan() || self.avg_degree < 1.0 || self.avg_degree > self.max_degree as f64 {
            return bad(format!(
                "average degree {} must be in [1, max degree {}]",
                self.avg_degree, self.max_degree
            ));
        }
        if self.max_degree >= self.nodes {
            return bad(format!(
                "max degree {} must be below node count {}",
                self.max_degree, self.nodes
            ));
        }
        // The exponential tail can only pull the mean down from the midpoint.
        if self.avg_degree >= (self.min_degree() + self.max_degree as f64) / 2.0 {
            return bad(format!(
                "average degree {} too close to max degree {}",
                self.avg_degree, self.max_degree
            ));
        }
        let (lo, hi) = self.community_sizes;
        if lo == 0 || lo > hi {
            return bad(format!("bad community size range [{lo}, {hi}]"));
        }
        if lo > self.nodes {
            return bad(format!("smallest community ({lo}) exceeds node count {}", self.nodes));
        }
        let internal = ((1.0 - self.mixing) * self.max_degree as f64).ceil() as usize;
        if lo < internal + 1 {
            return bad(format!(
                "communities of {lo} nodes cannot hold an internal degree of {internal}; \
                 the smallest community must have at least {} nodes",
                internal + 1
            ));
        }
        Ok(())
    }
}

/// Mean of an exponential with the given rate truncated to `[0, span]`.
fn truncated_mean(rate: f64, span: f64) -> f64 {
    if rate * span < 1e-9 {
        return span / 2.0;
    }
    1.0 / rate - span / (rate * span).exp_m1()
}

/// The rate whose truncated mean is `target` (`0 < target < span / 2`).
fn solve_rate(target: f64, span: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, 1.0);
    while truncated_mean(hi, span) > target {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if truncated_mean(mid, span) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn sample_degrees(params: &GeneratorParams, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let kmin = params.min_degree();
    let span = params.max_degree as f64 - kmin;
    let rate = solve_rate(params.avg_degree - kmin, span);
    let tail = -(-rate * span).exp_m1();
    (0..params.nodes)
        .map(|_| {
            // Inverse CDF of the truncated exponential, then stochastic
            // rounding so the integer degrees keep the continuous mean.
            let u: f64 = rng.gen();
            let x = kmin - (-u * tail).ln_1p() / rate;
            let floor = x.floor();
            let k = floor as usize + usize::from(rng.gen::<f64>() < x - floor);
            k.clamp(1, params.max_degree)
        })
        .collect()
}

fn community_sizes(params: &GeneratorParams, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let (lo, hi) = params.community_sizes;
    let mut sizes = Vec::new();
    let mut total = 0;
    while total < params.nodes {
        let s = rng.gen_range(lo..=hi).min(params.nodes - total);
        sizes.push(s);
        total += s;
    }
    // A short last community is folded into the others.
    if sizes.len() > 1 && *sizes.last().unwrap() < lo {
        let rest = sizes.pop().unwrap();
        let k = sizes.len();
        for i in 0..rest {
            sizes[i % k] += 1;
        }
    }
    sizes
}

/// Splits `total` stubs over nodes in proportion to `weights`, largest
/// remainders first.
fn apportion(weights: &[usize], total: usize) -> Vec<usize> {
    let sum: usize = weights.iter().sum();
    if sum == 0 {
        return vec![0; weights.len()];
    }
    let exact: Vec<f64> = weights.iter().map(|&w| w as f64 * total as f64 / sum as f64).collect();
    let mut out: Vec<usize> = exact.iter().map(|x| x.floor() as usize).collect();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        (exact[b] - out[b] as f64)
            .total_cmp(&(exact[a] - out[a] as f64))
            .then(a.cmp(&b))
    });
    let mut missing = total - out.iter().sum::<usize>();
    for &i in order.iter().cycle() {
        if missing == 0 {
            break;
        }
        if out[i] < weights[i] {
            out[i] += 1;
            missing -= 1;
        }
    }
    out
}

/// Configuration-model matching of `stubs`. `allowed` vetoes a pair; vetoed
/// and duplicate pairs go back into the pool for another shuffle.
fn pair_stubs(
    mut stubs: Vec<u32>,
    edges: &mut HashSet<(u32, u32)>,
    rng: &mut ChaCha8Rng,
    allowed: impl Fn(u32, u32) -> bool,
) -> usize {
    for _ in 0..50 {
        if stubs.len() < 2 {
            break;
        }
        stubs.shuffle(rng);
        let mut left = Vec::new();
        for pair in stubs.chunks(2) {
            let [u, v] = *pair else {
                left.extend_from_slice(pair);
                continue;
            };
            let key = (u.min(v), u.max(v));
            if u != v && allowed(u, v) && edges.insert(key) {
                continue;
            }
            left.push(u);
            left.push(v);
        }
        stubs = left;
    }
    stubs.len()
}

/// A planted-partition network with node ids `0..nodes` and its ground-truth
/// partition. Deterministic for a given seed.
pub fn generate_network(params: &GeneratorParams) -> Result<(Network, Partition)> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let degrees = sample_degrees(params, &mut rng);
    let sizes = community_sizes(params, &mut rng);

    let mut order: Vec<u32> = (0..params.nodes as u32).collect();
    order.shuffle(&mut rng);
    let mut membership = vec![0u32; params.nodes];
    let mut communities = Vec::with_capacity(sizes.len());
    let mut at = 0;
    for (c, &s) in sizes.iter().enumerate() {
        let mut members: Vec<u32> = order[at..at + s].to_vec();
        members.sort_unstable();
        for &u in &members {
            membership[u as usize] = c as u32;
        }
        communities.push(members);
        at += s;
    }

    let mut edges: HashSet<(u32, u32)> = HashSet::with_capacity(params.nodes * params.max_degree / 4);
    let mut external_stubs = Vec::new();
    let mut dropped = 0;
    for members in &communities {
        let k: Vec<usize> = members.iter().map(|&u| degrees[u as usize]).collect();
        let total: usize = k.iter().sum();
        let mut external = (params.mixing * total as f64).round() as usize;
        // Internal stubs pair up, so their count must be even.
        if (total - external) % 2 == 1 {
            external = if external < total { external + 1 } else { external - 1 };
        }
        let ext = apportion(&k, external);
        let mut internal_stubs = Vec::with_capacity(total - external);
        for ((&u, &ku), &eu) in members.iter().zip(&k).zip(&ext) {
            internal_stubs.extend(std::iter::repeat_n(u, ku - eu));
            external_stubs.extend(std::iter::repeat_n(u, eu));
        }
        dropped += pair_stubs(internal_stubs, &mut edges, &mut rng, |_, _| true);
    }
    dropped += pair_stubs(external_stubs, &mut edges, &mut rng, |u, v| {
        membership[u as usize] != membership[v as usize]
    });
    if dropped > 0 {
        log::debug!("generator dropped {dropped} unpairable stubs");
    }

    let mut edges: Vec<(u32, u32)> = edges.into_iter().collect();
    edges.sort_unstable();
    let (network, _) = Network::from_edges(params.nodes, &edges)?;
    let partition = Partition::new(
        communities
            .into_iter()
            .map(|c| c.into_iter().map(u64::from).collect())
            .collect(),
        params.nodes,
    )?;
    Ok((network, partition))
}

/// Moves `fraction` of the covered nodes, chosen at random, into a different
/// random community. Stands in for a detection result of known quality.
pub fn perturb_partition(partition: &Partition, fraction: f64, seed: u64) -> Result<Partition> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::Infeasible(format!(
            "perturbation fraction {fraction} outside [0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut communities: Vec<Vec<u64>> = partition.communities().map(<[u64]>::to_vec).collect();
    let k = communities.len();
    if k < 2 {
        return Ok(partition.clone());
    }
    let mut nodes: Vec<(usize, u64)> = communities
        .iter()
        .enumerate()
        .flat_map(|(c, members)| members.iter().map(move |&u| (c, u)))
        .collect();
    let moves = (fraction * nodes.len() as f64).round() as usize;
    let (chosen, _) = nodes.partial_shuffle(&mut rng, moves);
    let mut moved: HashSet<u64> = HashSet::with_capacity(moves);
    let mut arrivals: Vec<Vec<u64>> = vec![Vec::new(); k];
    for &(c, u) in chosen.iter() {
        let mut target = rng.gen_range(0..k - 1);
        if target >= c {
            target += 1;
        }
        moved.insert(u);
        arrivals[target].push(u);
    }
    for (members, extra) in communities.iter_mut().zip(arrivals) {
        members.retain(|u| !moved.contains(u));
        members.extend(extra);
    }
    communities.retain(|c| !c.is_empty());
    Partition::new(communities, partition.universe())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_solver_hits_the_target_mean() {
        for (target, span) in [(7.5, 42.5), (1.0, 10.0), (4.9, 10.0)] {
            let r = solve_rate(target, span);
            assert!((truncated_mean(r, span) - target).abs() < 1e-9);
        }
    }

    #[test]
    fn apportion_is_exact() {
        assert_eq!(apportion(&[10, 10, 10], 9), vec![3, 3, 3]);
        assert_eq!(apportion(&[1, 2, 3], 6), vec![1, 2, 3]);
        let a = apportion(&[7, 15, 3, 22], 14);
        assert_eq!(a.iter().sum::<usize>(), 14);
        assert!(a.iter().zip([7, 15, 3, 22]).all(|(&x, w)| x <= w));
    }

    #[test]
    fn sizes_stay_in_range() {
        let params = GeneratorParams::with_nodes(10_007, 3);
        let sizes = community_sizes(&params, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(sizes.iter().sum::<usize>(), 10_007);
        // Folding a short tail can push a few communities one past the top.
        assert!(sizes.iter().all(|&s| (50..=151).contains(&s)), "{sizes:?}");
    }

    #[test]
    fn infeasible_parameters_are_rejected() {
        let ok = GeneratorParams::default();
        assert!(ok.validate().is_ok());
        for bad in [
            GeneratorParams {
                mixing: 1.5,
                ..ok.clone()
            },
            GeneratorParams {
                community_sizes: (20, 40),
                ..ok.clone()
            },
            GeneratorParams {
                avg_degree: 60.0,
                ..ok.clone()
            },
            GeneratorParams {
                avg_degree: 40.0,
                ..ok.clone()
            },
            GeneratorParams {
                nodes: 40,
                ..ok.clone()
            },
        ] {
            assert!(matches!(generate_network(&bad), Err(Error::Infeasible(_))), "{bad:?}");
        }
        // Fully mixed networks need no internal room at all.
        let mixed = GeneratorParams {
            mixing: 1.0,
            community_sizes: (5, 10),
            ..ok
        };
        assert!(mixed.validate().is_ok());
    }

    #[test]
    fn perturbation_moves_the_requested_share() {
        let p = Partition::new((0..10).map(|c| (c * 20..c * 20 + 20).collect()).collect(), 200).unwrap();
        assert_eq!(perturb_partition(&p, 0.0, 1).unwrap(), p);
        let q = perturb_partition(&p, 0.25, 1).unwrap();
        let (a, b) = (p.to_node_map(), q.to_node_map());
        let mut moved = 0;
        for node in 0..200 {
            let same = q
                .community(b.get(node).unwrap())
                .iter()
                .filter(|&&x| a.get(x) == a.get(node))
                .count();
            if same * 2 < q.community(b.get(node).unwrap()).len() {
                moved += 1;
            }
        }
        assert_eq!(moved, 50);
        assert_eq!(q.covered(), 200);
        assert_eq!(perturb_partition(&p, 0.25, 1).unwrap(), q);
    }
}
