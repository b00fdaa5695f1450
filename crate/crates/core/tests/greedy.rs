mod common;

use proptest::prelude::*;
use rand::Rng;
use votecascade_core::diffusion::{enumerate_live_graphs, ReachEnsemble};
use votecascade_core::graph::with_constant_probability;
use votecascade_core::greedy::{
    brute_force_optimal, exact_expected_dmov, exact_x_of_s, greedy_apx, greedy_seed_selection, manipulable_set,
    optimal_spread, x_of_s, ExactSpread, SpreadOracle,
};
use votecascade_core::model::{delta_mov, Electorate, NoiseSpec};
use votecascade_core::scenario::Scenario;
use votecascade_core::stream::stream_rng;
use votecascade_core::Error;

/// The manipulator's model of the election: every voter sees the true positions.
fn predicted_electorate(e: &Electorate) -> Electorate {
    let voters: Vec<f64> = (0..e.n_voters()).map(|v| e.position(v)).collect();
    Electorate::from_positions(e.candidate_positions(), &voters, None, e.target()).unwrap()
}

#[test]
fn classification_matches_single_voter_retally() {
    let mut rng = stream_rng(1, &[]);
    for _ in 0..300 {
        let m = rng.random_range(2..=6);
        let e = common::random_electorate(&mut rng, 15, m, &NoiseSpec::Gaussian { mean: 0.0, variance: 1.0 });
        let delta = rng.random_range(0.05..=1.0);
        let set = manipulable_set(&e, delta);
        let predicted = predicted_electorate(&e);
        for v in 0..e.n_voters() {
            let before = predicted.votes()[v];
            let after = predicted.influenced(&[v], delta).votes()[v];
            let in_m = before != e.target() && after == e.target();
            assert_eq!(set.contains(v), in_m, "voter {v}");
            assert_eq!(set.weights()[v], in_m);
            let collateral = (before != e.target() && after != e.target() && after != before).then_some(after);
            assert_eq!(set.collateral_of(v), collateral, "voter {v}");
            assert_eq!(set.mask() >> v & 1 == 1, in_m);
        }
        assert_eq!(set.len(), set.members().len());
    }
}

/// Expected weighted spread over every live graph, computed from scratch.
fn exact_spread(s: &Scenario, weights: &[bool], seeds: &[usize]) -> f64 {
    enumerate_live_graphs(&s.network)
        .unwrap()
        .iter()
        .map(|(lg, p)| p * lg.reachable(&s.network, seeds).iter().filter(|&&v| weights[v]).count() as f64)
        .sum()
}

#[test]
fn exact_spread_oracle_agrees_with_enumeration() {
    let mut rng = stream_rng(2, &[]);
    for _ in 0..100 {
        let s = common::tiny_scenario(&mut rng, 7, 10, &NoiseSpec::Zero);
        let set = manipulable_set(&s.electorate, s.delta);
        let ens = ReachEnsemble::build(&s.network).unwrap();
        let mut oracle = ExactSpread::new(&ens, set.mask());
        let seeds: Vec<usize> = (0..7).filter(|_| rng.random::<f64>() < 0.3).collect();
        assert!((oracle.spread(&seeds) - exact_spread(&s, set.weights(), &seeds)).abs() < 1e-9);
    }
}

#[test]
fn greedy_reaches_the_approximation_bound() {
    let mut rng = stream_rng(3, &[]);
    let bound = 1.0 - (-1.0f64).exp();
    for _ in 0..200 {
        let s = common::tiny_scenario(&mut rng, 7, 12, &NoiseSpec::Uniform { lo: -0.2, hi: 0.2 });
        let set = manipulable_set(&s.electorate, s.delta);
        let ens = ReachEnsemble::build(&s.network).unwrap();
        let budget = rng.random_range(1..=3);
        let mut oracle = ExactSpread::new(&ens, set.mask());
        let (_, best) = optimal_spread(&mut oracle, budget);
        for lazy in [false, true] {
            let out = greedy_seed_selection(&mut oracle, budget, lazy);
            assert!(out.spread >= bound * best - 1e-9, "{} < {bound} * {best}", out.spread);
            assert!(out.seeds.len() <= budget);
            let mut sorted = out.seeds.clone();
            sorted.sort_unstable();
            sorted.dedup();
            assert_eq!(sorted.len(), out.seeds.len());
        }
    }
}

#[test]
fn exact_marginal_gains_never_increase() {
    let mut rng = stream_rng(4, &[]);
    for _ in 0..200 {
        let s = common::tiny_scenario(&mut rng, 8, 12, &NoiseSpec::Zero);
        let set = manipulable_set(&s.electorate, s.delta);
        let ens = ReachEnsemble::build(&s.network).unwrap();
        let mut oracle = ExactSpread::new(&ens, set.mask());
        let plain = greedy_seed_selection(&mut oracle, 5, false);
        assert!(plain.gains.windows(2).all(|w| w[1] <= w[0] + 1e-9), "{:?}", plain.gains);
        let lazy = greedy_seed_selection(&mut oracle, 5, true);
        assert!((plain.spread - lazy.spread).abs() < 1e-9);
    }
}

#[test]
fn collateral_estimate_matches_exact_value() {
    let mut rng = stream_rng(5, &[]);
    let runs = 5000;
    for _ in 0..30 {
        let s = common::tiny_scenario(&mut rng, 7, 10, &NoiseSpec::Gaussian { mean: 0.0, variance: 1.0 });
        let ens = ReachEnsemble::build(&s.network).unwrap();
        let seeds = vec![0, rng.random_range(1..7)];
        let exact = exact_x_of_s(&s, &ens, &seeds);
        let estimate = x_of_s(&s, &seeds, runs, &mut rng);
        // The collateral count is bounded by n, so its standard deviation is at most n / 2.
        assert!((estimate - exact).abs() <= 4.0 * 3.5 / (runs as f64).sqrt(), "{estimate} vs {exact}");
    }
}

#[test]
fn exact_dmov_matches_retally_over_live_graphs() {
    let mut rng = stream_rng(6, &[]);
    for _ in 0..100 {
        let s = common::tiny_scenario(&mut rng, 6, 9, &NoiseSpec::Gaussian { mean: 0.0, variance: 0.08 });
        let ens = ReachEnsemble::build(&s.network).unwrap();
        let seeds: Vec<usize> = (0..6).filter(|_| rng.random::<f64>() < 0.4).collect();
        let before = s.electorate.tally();
        let retally: f64 = enumerate_live_graphs(&s.network)
            .unwrap()
            .iter()
            .map(|(lg, p)| {
                let after = s.electorate.influenced(&lg.reachable(&s.network, &seeds), s.delta).tally();
                p * delta_mov(&before, &after, s.target()) as f64
            })
            .sum();
        assert!((exact_expected_dmov(&s, &ens, &seeds) - retally).abs() < 1e-9);
    }
}

#[test]
fn without_spread_the_optimum_is_the_best_single_conversion() {
    let mut rng = stream_rng(7, &[]);
    for _ in 0..100 {
        let s = common::tiny_scenario(&mut rng, 8, 12, &NoiseSpec::Uniform { lo: -0.2, hi: 0.2 });
        let net = with_constant_probability(&s.network, 0.0).unwrap();
        let s = Scenario::new(s.electorate.clone(), net, s.delta).unwrap();
        let before = s.electorate.tally();
        let best_single = (0..8)
            .map(|v| delta_mov(&before, &s.electorate.influenced(&[v], s.delta).tally(), s.target()))
            .max()
            .unwrap()
            .max(0) as f64;
        let (seeds, value) = brute_force_optimal(&s, 1).unwrap();
        assert_eq!(value, best_single);
        assert!(seeds.len() <= 1);
    }
}

#[test]
fn brute_force_refuses_large_instances() {
    let mut rng = stream_rng(8, &[]);
    let s = common::ws_scenario(&mut rng, 60, &NoiseSpec::Zero, 0.2);
    assert!(matches!(brute_force_optimal(&s, 3), Err(Error::Capability(_))));
}

#[test]
fn greedy_apx_is_reproducible_and_within_budget() {
    let mut rng = stream_rng(9, &[]);
    let s = common::ws_scenario(&mut rng, 40, &NoiseSpec::Gaussian { mean: 0.0, variance: 0.08 }, 0.2);
    let a = greedy_apx(&s, 4, 50, false, stream_rng(10, &[]));
    let b = greedy_apx(&s, 4, 50, false, stream_rng(10, &[]));
    assert_eq!(a, b);
    assert_eq!(a.len(), 4);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 100, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn greedy_never_exceeds_the_budget(seed in any::<u64>(), budget in 0usize..12, lazy in any::<bool>()) {
        let mut rng = stream_rng(seed, &[]);
        let s = common::tiny_scenario(&mut rng, 8, 10, &NoiseSpec::Zero);
        let seeds = greedy_apx(&s, budget, 20, lazy, &mut rng);
        prop_assert_eq!(seeds.len(), budget.min(8));
        prop_assert!(seeds.iter().all(|&v| v < 8));
    }
}
