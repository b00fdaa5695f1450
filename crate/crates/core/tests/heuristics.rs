mod common;

use proptest::prelude::*;
use rand::Rng;
use votecascade_core::graph::{Edge, SocialNetwork};
use votecascade_core::greedy::manipulable_set;
use votecascade_core::heuristics::{
    combine_and_rank, political_distances, political_score, rank_descending, structural_score, weighted_pagerank,
    Combiner, Filter, Heuristic, NeighborhoodScorer, NeighborhoodSpec, PageRankOptions, PoliticalDistance, CATALOG,
};
use votecascade_core::model::NoiseSpec;
use votecascade_core::stream::stream_rng;

/// Stationary vector of the damped walk, by Gaussian elimination on
/// `(I - s M) r = (1 - s) / n`, where `M[v][u]` is the share `u` passes to `v`.
fn pagerank_by_linear_solve(net: &SocialNetwork, z: &[f64], s: f64) -> Vec<f64> {
    let n = net.n();
    let mut a = vec![vec![0.0; n + 1]; n];
    for (v, row) in a.iter_mut().enumerate() {
        row[v] = 1.0;
        row[n] = (1.0 - s) / n as f64;
    }
    for u in 0..n {
        let out = net.out_neighbors(u);
        let total: f64 = out.iter().map(|&v| z[v]).sum();
        if out.is_empty() {
            for row in a.iter_mut() {
                row[u] -= s / n as f64;
            }
        } else {
            for &v in out {
                let share = if total > 0.0 { z[v] / total } else { 1.0 / out.len() as f64 };
                a[v][u] -= s * share;
            }
        }
    }
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, pivot);
        for i in 0..n {
            if i != col {
                let f = a[i][col] / a[col][col];
                for k in col..=n {
                    a[i][k] -= f * a[col][k];
                }
            }
        }
    }
    (0..n).map(|i| a[i][n] / a[i][i]).collect()
}

fn random_weights<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| if rng.random::<f64>() < 0.3 { 0.0 } else { rng.random_range(0.0..3.0) }).collect()
}

#[test]
fn three_node_pagerank_matches_linear_solve() {
    let net = SocialNetwork::from_edges(
        3,
        &[
            Edge { source: 0, target: 1, probability: 0.5 },
            Edge { source: 0, target: 2, probability: 0.5 },
            Edge { source: 1, target: 2, probability: 0.5 },
            Edge { source: 2, target: 0, probability: 0.5 },
        ],
    )
    .unwrap();
    let z = [1.0, 1.0, 3.0];
    let pr = weighted_pagerank(&net, &z, PageRankOptions::default()).unwrap();
    let oracle = pagerank_by_linear_solve(&net, &z, 0.85);
    assert!(pr.converged);
    for (a, b) in pr.ranks.iter().zip(&oracle) {
        assert!((a - b).abs() < 1e-9, "{:?} vs {oracle:?}", pr.ranks);
    }
}

#[test]
fn pagerank_matches_linear_solve_on_random_graphs() {
    let mut rng = stream_rng(1, &[]);
    for _ in 0..200 {
        let n = rng.random_range(1..=12);
        let net = common::random_tiny_net(&mut rng, n, 3 * n);
        let z = random_weights(&mut rng, n);
        let pr = weighted_pagerank(&net, &z, PageRankOptions::default()).unwrap();
        let oracle = pagerank_by_linear_solve(&net, &z, 0.85);
        for (a, b) in pr.ranks.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-8, "{:?} vs {oracle:?}", pr.ranks);
        }
    }
}

#[test]
fn merge_standardizes_without_centering() {
    let sg = [1.0, 2.0, 3.0];
    let sp = [3.0, 0.0, 0.0];
    // Population standard deviations: sqrt(2/3) and sqrt(2).
    let (g, p) = ((2.0f64 / 3.0).sqrt(), 2.0f64.sqrt());
    let merged: Vec<f64> = (0..3).map(|i| 0.5 * sp[i] / p + 0.5 * sg[i] / g).collect();
    let expected = rank_descending(&merged);
    assert_eq!(expected, vec![2, 0, 1]);
    assert_eq!(combine_and_rank(&sg, &sp, Combiner::Merge(0.5)), expected);
    // A constant score contributes nothing.
    assert_eq!(combine_and_rank(&[4.0; 3], &sp, Combiner::Merge(0.5)), vec![0, 1, 2]);
    assert_eq!(combine_and_rank(&sg, &sp, Combiner::LexGP), vec![2, 1, 0]);
    assert_eq!(combine_and_rank(&sg, &sp, Combiner::LexPG), vec![0, 2, 1]);
}

#[test]
fn one_hop_scoring_visits_each_edge_once() {
    let mut rng = stream_rng(2, &[]);
    for _ in 0..50 {
        let s = common::ws_scenario(&mut rng, 60, &NoiseSpec::Zero, 0.2);
        let d = political_distances(&s.electorate, s.delta, PoliticalDistance::Standard, None);
        let mut scorer = NeighborhoodScorer::new(60, NeighborhoodSpec::hops(1)).unwrap();
        let (sg, _) = scorer.all_scores(&s.network, &d, Filter::Positive);
        assert_eq!(scorer.edge_visits(), s.network.edge_count() as u64);
        for v in 0..60 {
            assert_eq!(sg[v], s.network.out_degree(v) as f64);
        }
    }
}

/// Neighbourhood weights by walking every path of length one and two.
fn two_hop_political_by_paths(net: &SocialNetwork, v: usize, d: &[f64], filter: Filter) -> f64 {
    let term = |w: f64, x: usize| if filter.accepts(d[x]) && d[x].is_finite() { w / d[x] } else { 0.0 };
    let mut hop = vec![usize::MAX; net.n()];
    let mut weight = vec![0.0f64; net.n()];
    for (a, pa) in net.out_neighbors(v).iter().zip(net.out_probabilities(v)) {
        hop[*a] = 1;
        weight[*a] = *pa;
    }
    for &a in net.out_neighbors(v) {
        for (x, px) in net.out_neighbors(a).iter().zip(net.out_probabilities(a)) {
            if *x != v && hop[*x] != 1 {
                hop[*x] = 2;
                weight[*x] = weight[*x].max(weight[a] * px);
            }
        }
    }
    term(1.0, v) + (0..net.n()).filter(|&x| hop[x] <= 2).map(|x| term(weight[x], x)).sum::<f64>()
}

#[test]
fn two_hop_political_scores_match_path_walk() {
    let mut rng = stream_rng(3, &[]);
    for _ in 0..100 {
        let s = common::tiny_scenario(&mut rng, 10, 30, &NoiseSpec::Gaussian { mean: 0.0, variance: 0.08 });
        for kind in [PoliticalDistance::Standard, PoliticalDistance::ManipStar, PoliticalDistance::ManipEq1] {
            let d = political_distances(&s.electorate, s.delta, kind, None);
            let filter = if kind == PoliticalDistance::ManipEq1 { Filter::EqOne } else { Filter::Positive };
            for v in 0..10 {
                let got = political_score(&s.network, v, NeighborhoodSpec::hops(2), &d, filter).unwrap();
                let want = two_hop_political_by_paths(&s.network, v, &d, filter);
                assert!((got - want).abs() < 1e-12, "node {v}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn size_cap_keeps_the_nearest_nodes() {
    let mut rng = stream_rng(4, &[]);
    let s = common::ws_scenario(&mut rng, 100, &NoiseSpec::Zero, 0.2);
    let mut full = NeighborhoodScorer::new(100, NeighborhoodSpec::hops(3)).unwrap();
    let spec = NeighborhoodSpec { max_hops: 3, max_size: Some(5) };
    let mut capped = NeighborhoodScorer::new(100, spec).unwrap();
    for v in 0..100 {
        let all = full.neighborhood(&s.network, v).to_vec();
        let some = capped.neighborhood(&s.network, v).to_vec();
        assert_eq!(some.as_slice(), &all[..all.len().min(5)]);
    }
    assert!(structural_score(&s.network, 0, NeighborhoodSpec::hops(0)).is_err());
}

#[test]
fn empty_manipulable_set_reduces_to_plain_pagerank() {
    let mut rng = stream_rng(5, &[]);
    let h = Heuristic::by_name("SPpagerank1.0_manip_eq1").unwrap();
    let mut checked = 0;
    while checked < 20 {
        let s = common::ws_scenario(&mut rng, 30, &NoiseSpec::Zero, 0.01);
        if !manipulable_set(&s.electorate, s.delta).is_empty() {
            continue;
        }
        checked += 1;
        let plain = pagerank_by_linear_solve(&s.network, &[1.0; 30], 0.85);
        let got = h.rank(&s, PageRankOptions::default()).unwrap();
        // Compare scores rather than orders so near-ties cannot flip the check.
        for w in got.windows(2) {
            assert!(plain[w[0]] >= plain[w[1]] - 1e-9);
        }
    }
}

#[test]
fn outdegree_heuristic_is_lexicographic() {
    let mut rng = stream_rng(6, &[]);
    for _ in 0..20 {
        let s = common::ws_scenario(&mut rng, 80, &NoiseSpec::Uniform { lo: -0.2, hi: 0.2 }, 0.2);
        let d = political_distances(&s.electorate, s.delta, PoliticalDistance::Standard, None);
        let sp: Vec<f64> = (0..80)
            .map(|v| political_score(&s.network, v, NeighborhoodSpec::hops(1), &d, Filter::Positive).unwrap())
            .collect();
        let order = Heuristic::by_name("SPoutdeg").unwrap().rank(&s, PageRankOptions::default()).unwrap();
        for w in order.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (da, db) = (s.network.out_degree(a), s.network.out_degree(b));
            assert!(da > db || (da == db && (sp[a] > sp[b] || (sp[a] == sp[b] && a < b))));
        }
    }
}

#[test]
fn heuristics_are_deterministic() {
    let mut rng = stream_rng(7, &[]);
    let s = common::ws_scenario(&mut rng, 60, &NoiseSpec::Gaussian { mean: 0.0, variance: 1.0 }, 0.3);
    for h in CATALOG {
        let first = h.select(&s, 6, PageRankOptions::default()).unwrap();
        assert_eq!(first.len(), 6);
        for _ in 0..100 {
            assert_eq!(h.select(&s, 6, PageRankOptions::default()).unwrap(), first, "{h}");
        }
    }
}

#[test]
fn catalog_names_round_trip() {
    for h in CATALOG {
        assert_eq!(h.to_string().parse::<Heuristic>().unwrap(), h);
    }
    assert_eq!("SPpagerank1.0_manipstar_pos".parse::<Heuristic>().unwrap().name, "SPpagerank1.0_manip*_pos");
    assert!("SPoutdegree".parse::<Heuristic>().is_err());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 300, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn pagerank_is_a_distribution_and_scale_free(seed in any::<u64>(), n in 1usize..40, scale in 0.01f64..100.0) {
        let mut rng = stream_rng(seed, &[]);
        let net = common::random_tiny_net(&mut rng, n, 3 * n);
        let z = random_weights(&mut rng, n);
        let a = weighted_pagerank(&net, &z, PageRankOptions::default()).unwrap();
        prop_assert!((a.ranks.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!(a.ranks.iter().all(|&r| r > 0.0));
        let scaled: Vec<f64> = z.iter().map(|w| w * scale).collect();
        let b = weighted_pagerank(&net, &scaled, PageRankOptions::default()).unwrap();
        for (x, y) in a.ranks.iter().zip(&b.ranks) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn gain_ratio_distance_is_at_least_one(seed in any::<u64>()) {
        let mut rng = stream_rng(seed, &[]);
        let e = common::random_electorate(&mut rng, 20, 4, &NoiseSpec::Gaussian { mean: 0.0, variance: 1.0 });
        let delta = rng.random_range(0.01..=2.0);
        let m = manipulable_set(&e, delta);
        let d = political_distances(&e, delta, PoliticalDistance::ManipStar, Some(&m));
        for v in 0..20 {
            prop_assert!(d[v] == 0.0 || d[v] >= 1.0, "voter {} distance {}", v, d[v]);
            prop_assert_eq!(d[v] == 0.0, e.predicted_vote(v) == e.target());
            if m.contains(v) {
                prop_assert_eq!(d[v], 1.0);
            }
        }
    }
}
