//! Oracles shared by the integration tests and the acceptance runner.
#![allow(dead_code)]

use coopgrow::game::{synchronous_generation, GameParams, Strategy};
use coopgrow::network::{GrowthMechanism, Network};
use coopgrow::SimRng;
use rand::{Rng, SeedableRng};

use Strategy::{Cooperate as C, Defect as D};

/// Flip probability of every node under one synchronous generation,
/// enumerating (neighbour choice x Fermi coin) with payoffs computed from
/// scratch.
pub fn enumerate_flip_probabilities(
    nodes: usize,
    edges: &[(usize, usize)],
    s: &[Strategy],
    r: f64,
    beta: f64,
) -> Vec<f64> {
    let mut adj = vec![Vec::new(); nodes];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let pay: Vec<f64> = (0..nodes)
        .map(|i| {
            let kc = adj[i].iter().filter(|&&j| s[j] == C).count() as f64;
            let k = adj[i].len() as f64;
            if s[i] == C {
                r * kc - k
            } else {
                r * kc
            }
        })
        .collect();
    (0..nodes)
        .map(|i| {
            if adj[i].is_empty() {
                return 0.0;
            }
            let k = adj[i].len() as f64;
            adj[i]
                .iter()
                .filter(|&&j| s[j] != s[i])
                .map(|&j| 1.0 / (1.0 + (-beta * (pay[j] - pay[i])).exp()) / k)
                .sum()
        })
        .collect()
}

pub fn flip_frequencies(
    net: &Network,
    s: &[Strategy],
    p: &GameParams,
    trials: usize,
    seed: u64,
) -> Vec<f64> {
    let mut rng = SimRng::seed_from_u64(seed);
    let mut flips = vec![0usize; s.len()];
    for _ in 0..trials {
        let out = synchronous_generation(net, s, p, &mut rng);
        for (i, (a, b)) in s.iter().zip(&out).enumerate() {
            if a != b {
                flips[i] += 1;
            }
        }
    }
    flips.iter().map(|&f| f as f64 / trials as f64).collect()
}

pub fn assert_within_three_sigma(freq: &[f64], expected: &[f64], trials: usize) {
    for (i, (&f, &p)) in freq.iter().zip(expected).enumerate() {
        let se = (p * (1.0 - p) / trials as f64).sqrt().max(1e-12);
        assert!(
            (f - p).abs() <= 3.0 * se,
            "node {i}: observed {f}, expected {p}"
        );
    }
}

/// Whether every observed frequency lies within three binomial standard
/// errors of its expected probability.
pub fn within_three_sigma(freq: &[f64], expected: &[f64], trials: usize) -> bool {
    freq.iter().zip(expected).all(|(&f, &p)| {
        let se = (p * (1.0 - p) / trials as f64).sqrt().max(1e-12);
        (f - p).abs() <= 3.0 * se
    })
}

/// A random simple graph (grown or Erdos-Renyi, up to 200 nodes), random
/// strategies and a dyadic `r`.
pub fn random_instance(seed: u64) -> (Network, Vec<Strategy>, f64) {
    let mut rng = SimRng::seed_from_u64(seed);
    let nodes = rng.random_range(2..=200);
    let net = if rng.random_bool(0.5) {
        let links = rng.random_range(1..=nodes.min(6));
        let mech = if rng.random_bool(0.5) {
            GrowthMechanism::PreferentialAttachment
        } else {
            GrowthMechanism::RandomAttachment
        };
        Network::grow(mech, links, nodes, &mut rng).unwrap()
    } else {
        let p = rng.random_range(0.0..0.2);
        let mut edges = Vec::new();
        for j in 1..nodes {
            for i in 0..j {
                if rng.random_bool(p) {
                    edges.push((i, j));
                }
            }
        }
        Network::from_edges(nodes, &edges).unwrap()
    };
    let pc = rng.random_range(0.0..1.0);
    let s = (0..nodes)
        .map(|_| if rng.random_bool(pc) { C } else { D })
        .collect();
    // Multiples of 1/8 keep every payoff exactly representable.
    let r = 1.0 + rng.random_range(1..=64) as f64 / 8.0;
    (net, s, r)
}
