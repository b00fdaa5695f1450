mod common;

use rand::Rng;
use votecascade_core::campaign::{budget_for, run_campaign, Algorithm, CampaignConfig, Clock, NullClock, GREEDY_APX};
use votecascade_core::graph::NetworkBuilder;
use votecascade_core::heuristics::CATALOG;
use votecascade_core::model::{Electorate, NoiseSpec};
use votecascade_core::scenario::Scenario;
use votecascade_core::stream::stream_rng;

fn random_algorithm<R: Rng>(rng: &mut R) -> Algorithm {
    match rng.random_range(0..=CATALOG.len()) {
        i if i < CATALOG.len() => Algorithm::Heuristic(CATALOG[i]),
        _ => Algorithm::GreedyApx { runs: 10, lazy: rng.random() },
    }
}

#[test]
fn target_support_never_shrinks() {
    let mut rng = stream_rng(1, &[]);
    let noises =
        [NoiseSpec::Zero, NoiseSpec::Uniform { lo: -0.2, hi: 0.2 }, NoiseSpec::Gaussian { mean: 0.0, variance: 1.0 }];
    for i in 0..1000 {
        let delta = rng.random_range(0.05..=0.5);
        let s = common::ws_scenario(&mut rng, 20, &noises[i % 3], delta);
        let mut config = CampaignConfig::new(random_algorithm(&mut rng), 0.1);
        config.rounds = 4;
        let reports = run_campaign(&s, &config, &mut rng, &NullClock).unwrap();
        let mut support = s.electorate.tally().get(s.target());
        for r in &reports {
            let now = r.tally.get(s.target());
            assert!(now >= support, "campaign {i} round {}: {now} < {support}", r.round);
            support = now;
        }
    }
}

/// Every voter sits at 0.95 between a target at 0 and a rival at 1, and
/// everyone hears every seed. Each round moves voters 0.2 closer: 0.75, 0.55,
/// then 0.35, which is nearer the target.
#[test]
fn complete_graph_becomes_unanimous_in_the_third_round() {
    let n = 10;
    let e = Electorate::from_positions(&[0.0, 1.0], &[0.95; 10], None, 0).unwrap();
    let mut b = NetworkBuilder::new(n);
    for u in 0..n {
        for v in u + 1..n {
            b.add_mutual(u, v, 1.0);
        }
    }
    let s = Scenario::new(e, b.build(), 0.2).unwrap();
    for algorithm in ["SPoutdeg", "SPpagerank1.0_pos", GREEDY_APX] {
        let config = CampaignConfig::new(algorithm.parse().unwrap(), 0.1);
        let reports = run_campaign(&s, &config, &mut stream_rng(2, &[]), &NullClock).unwrap();
        let votes: Vec<usize> = reports.iter().map(|r| r.tally.get(0)).collect();
        assert_eq!(votes, vec![0, 0, n], "{algorithm}");
        assert!(reports.iter().all(|r| r.activated == n));
        let last = reports.last().unwrap();
        assert_eq!(last.mov, n as i64);
        assert_eq!(last.cumulative_dmov, 2 * n as i64);
        assert_eq!(last.normalized_dmov, 1.0);
    }
}

#[test]
fn reports_respect_the_configuration() {
    let mut rng = stream_rng(3, &[]);
    for _ in 0..50 {
        let s = common::ws_scenario(&mut rng, 40, &NoiseSpec::Gaussian { mean: 0.0, variance: 0.08 }, 0.2);
        let fraction = [0.05, 0.1, 0.15][rng.random_range(0..3)];
        let mut config = CampaignConfig::new(random_algorithm(&mut rng), fraction);
        config.rounds = rng.random_range(1..=3);
        let seed = rng.random();
        let reports = run_campaign(&s, &config, &mut stream_rng(seed, &[]), &NullClock).unwrap();
        assert!(!reports.is_empty() && reports.len() <= config.rounds);
        let initial = s.electorate.tally().margin_of_victory(s.target());
        for (i, r) in reports.iter().enumerate() {
            assert_eq!(r.round, i + 1);
            assert!(r.seeds.len() <= budget_for(fraction, 40));
            assert!(r.activated >= r.seeds.len());
            assert_eq!(r.cumulative_dmov, r.mov - initial);
            assert!(r.normalized_dmov <= 1.0 + 1e-12);
            assert_eq!(r.tally.total(), 40);
        }
        let again = run_campaign(&s, &config, &mut stream_rng(seed, &[]), &NullClock).unwrap();
        assert_eq!(reports, again);
    }
}

#[test]
fn single_round_campaign_reports_once() {
    let mut rng = stream_rng(4, &[]);
    let s = common::ws_scenario(&mut rng, 50, &NoiseSpec::Zero, 0.3);
    let mut config = CampaignConfig::new("SPneig2".parse().unwrap(), 0.1);
    config.rounds = 1;
    let reports = run_campaign(&s, &config, &mut rng, &NullClock).unwrap();
    assert_eq!(reports.len(), 1);
    assert_eq!(reports[0].seeds.len(), 5);
}

struct TickClock(std::cell::Cell<f64>);

impl Clock for TickClock {
    fn seconds(&self) -> f64 {
        let t = self.0.get();
        self.0.set(t + 0.5);
        t
    }
}

#[test]
fn selection_time_is_measured_with_the_supplied_clock() {
    let mut rng = stream_rng(5, &[]);
    let s = common::ws_scenario(&mut rng, 30, &NoiseSpec::Zero, 0.2);
    let mut config = CampaignConfig::new(Algorithm::greedy(), 0.1);
    config.rounds = 2;
    config.stop_at_unanimity = false;
    let reports = run_campaign(&s, &config, &mut rng, &TickClock(std::cell::Cell::new(0.0))).unwrap();
    assert!(reports.iter().all(|r| r.selection_seconds == 0.5));
}
