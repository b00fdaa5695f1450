#![allow(dead_code)]

use rand::Rng;
use votecascade_core::graph::{
    assign_uniform_random_probabilities, gen_watts_strogatz_spatial, Edge, SocialNetwork, SpatialParams,
};
use votecascade_core::model::{sample_views, Candidate, Electorate, NoiseSpec};
use votecascade_core::scenario::Scenario;

/// Random directed graph on `n` nodes with at most `max_edges` edges and
/// probabilities drawn uniformly, some of them pinned to 0 or 1.
pub fn random_tiny_net<R: Rng>(rng: &mut R, n: usize, max_edges: usize) -> SocialNetwork {
    let mut pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v))).collect();
    for i in (1..pairs.len()).rev() {
        pairs.swap(i, rng.random_range(0..=i));
    }
    let m = rng.random_range(0..=max_edges.min(pairs.len()));
    let edges: Vec<Edge> = pairs[..m]
        .iter()
        .map(|&(source, target)| {
            let probability = match rng.random_range(0..10) {
                0 => 0.0,
                1 => 1.0,
                _ => rng.random(),
            };
            Edge { source, target, probability }
        })
        .collect();
    SocialNetwork::from_edges(n, &edges).unwrap()
}

pub fn random_electorate<R: Rng>(rng: &mut R, n_voters: usize, n_candidates: usize, noise: &NoiseSpec) -> Electorate {
    let candidates: Vec<Candidate> =
        (0..n_candidates).map(|id| Candidate { id, position: rng.random_range(-1.0..=1.0) }).collect();
    let voters: Vec<f64> = (0..n_voters).map(|_| rng.random_range(-1.0..=1.0)).collect();
    let views = sample_views(&candidates, n_voters, noise, rng).unwrap();
    let positions: Vec<f64> = candidates.iter().map(|c| c.position).collect();
    let target = rng.random_range(0..n_candidates);
    Electorate::from_positions(&positions, &voters, Some(views), target).unwrap()
}

/// Spatial small-world scenario with uniform random probabilities.
pub fn ws_scenario<R: Rng>(rng: &mut R, n: usize, noise: &NoiseSpec, delta: f64) -> Scenario {
    let g = gen_watts_strogatz_spatial(n, SpatialParams::default(), rng).unwrap();
    let net = assign_uniform_random_probabilities(&g.network, rng);
    let electorate = random_electorate(rng, n, 5, noise);
    Scenario::new(electorate, net, delta).unwrap()
}

/// Tiny scenario on a random graph.
pub fn tiny_scenario<R: Rng>(rng: &mut R, n: usize, max_edges: usize, noise: &NoiseSpec) -> Scenario {
    let net = random_tiny_net(rng, n, max_edges);
    let m = rng.random_range(2..=4);
    let electorate = random_electorate(rng, n, m, noise);
    let delta = [0.1, 0.2, 0.3, 0.4][rng.random_range(0..4)];
    Scenario::new(electorate, net, delta).unwrap()
}

/// Standard error of a 0/1 frequency.
pub fn binomial_band(p: f64, runs: usize) -> f64 {
    (p * (1.0 - p) / runs as f64).sqrt()
}
