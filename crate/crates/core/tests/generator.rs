use std::collections::HashMap;

use commeval::bench::{generate_network, GeneratorParams};
use commeval::{load_communities, load_edge_list, write_communities, write_edge_list};

fn files(params: &GeneratorParams) -> (Vec<u8>, Vec<u8>) {
    let (network, partition) = generate_network(params).unwrap();
    let (mut edges, mut comms) = (Vec::new(), Vec::new());
    write_edge_list(&network, &mut edges).unwrap();
    write_communities(&partition, &mut comms).unwrap();
    (edges, comms)
}

#[test]
fn same_seed_same_bytes() {
    let params = GeneratorParams::with_nodes(1000, 42);
    assert_eq!(files(&params), files(&params));
    let other = GeneratorParams::with_nodes(1000, 43);
    assert_ne!(files(&params).0, files(&other).0);
}

#[test]
fn output_round_trips_through_the_loaders() {
    let params = GeneratorParams::with_nodes(2000, 9);
    let (network, partition) = generate_network(&params).unwrap();
    let (edges, comms) = files(&params);
    let (loaded, stats) = load_edge_list(&edges[..]).unwrap();
    assert_eq!((stats.duplicate_edges, stats.self_loops), (0, 0));
    assert_eq!(loaded.external_edges(), network.external_edges());
    let p = load_communities(&comms[..], 2000).unwrap();
    assert_eq!(p, partition);
    assert_eq!(p.covered(), 2000);
    // Every node is in the network and in exactly one community.
    assert_eq!(network.node_count(), 2000);
    for members in p.communities() {
        assert!((50..=151).contains(&members.len()));
    }
}

#[test]
fn degree_and_mixing_hit_their_targets() {
    let params = GeneratorParams::with_nodes(100_000, 42);
    let (network, partition) = generate_network(&params).unwrap();
    let mean_degree = 2.0 * network.edge_count() as f64 / network.node_count() as f64;
    println!("mean degree {mean_degree:.3}");
    assert!((mean_degree - 15.0).abs() <= 0.05 * 15.0, "{mean_degree}");
    let max = (0..network.node_count() as u32)
        .map(|u| network.degree(u))
        .max()
        .unwrap();
    assert!(max <= 50);

    let map = partition.to_node_map();
    let community: Vec<u32> = (0..network.node_count() as u32)
        .map(|u| map.get(network.external_id(u)).unwrap())
        .collect();
    let mut volume: HashMap<u32, (u64, u64)> = HashMap::new();
    for (u, v) in network.edges() {
        let (cu, cv) = (community[u as usize], community[v as usize]);
        let boundary = u64::from(cu != cv);
        for c in [cu, cv] {
            let e = volume.entry(c).or_default();
            e.0 += 1;
            e.1 += boundary;
        }
    }
    let mut worst: f64 = 0.0;
    for &(endpoints, boundary) in volume.values() {
        let fraction = boundary as f64 / endpoints as f64;
        worst = worst.max((fraction - 0.3).abs());
    }
    println!("worst per-community boundary fraction deviation {worst:.4}");
    assert!(worst <= 0.05);
}
