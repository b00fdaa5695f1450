//! Seed selection by weighted influence maximization over the manipulable
//! voters, with exact oracles for tiny instances.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::Rng;

use crate::diffusion::{IcSimulator, ReachEnsemble};
use crate::estimation::estimate_sigma_w_with;
use crate::graph::SocialNetwork;
use crate::model::{apply_influence, preferred_candidate, CandidateId, Electorate};
use crate::scenario::{MaskIter, Scenario};
use crate::{Error, Result};

/// Default Monte Carlo runs per spread evaluation.
pub const DEFAULT_SPREAD_RUNS: u64 = 300;

/// Largest `C(n, B) * 2^|E|` the brute-force optimum will enumerate.
pub const BRUTE_FORCE_LIMIT: f64 = 1e7;

/// Voters the manipulator expects to win over (`M`) and voters expected to
/// switch to some other candidate when influenced (`M_bar[c]`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManipulableSet {
    target: CandidateId,
    in_m: Vec<bool>,
    switches_to: Vec<Option<CandidateId>>,
}

impl ManipulableSet {
    pub fn target(&self) -> CandidateId {
        self.target
    }

    /// Unit weight per voter: membership in `M`.
    pub fn weights(&self) -> &[bool] {
        &self.in_m
    }

    pub fn contains(&self, v: usize) -> bool {
        self.in_m[v]
    }

    pub fn members(&self) -> Vec<usize> {
        (0..self.in_m.len()).filter(|&v| self.in_m[v]).collect()
    }

    pub fn len(&self) -> usize {
        self.in_m.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Opponent `v` would switch to, if `v` is in some `M_bar[c]`.
    pub fn collateral_of(&self, v: usize) -> Option<CandidateId> {
        self.switches_to[v]
    }

    /// Members of `M_bar[c]`.
    pub fn collateral(&self, c: CandidateId) -> Vec<usize> {
        (0..self.switches_to.len()).filter(|&v| self.switches_to[v] == Some(c)).collect()
    }

    /// Bitmask of `M` (first 64 voters).
    pub fn mask(&self) -> u64 {
        self.in_m.iter().enumerate().take(64).fold(0, |acc, (v, &b)| acc | (u64::from(b) << v))
    }
}

/// Classify every voter using what the manipulator knows: true candidate
/// positions, not the voters' views.
pub fn manipulable_set(electorate: &Electorate, delta: f64) -> ManipulableSet {
    let target = electorate.target();
    let positions = electorate.candidate_positions();
    let n = electorate.n_voters();
    let mut in_m = vec![false; n];
    let mut switches_to = vec![None; n];
    for v in 0..n {
        let before = electorate.predicted_vote(v);
        if before == target {
            continue;
        }
        let moved = apply_influence(electorate.position(v), positions[target], delta);
        let after = preferred_candidate(moved, positions, Some(before));
        if after == target {
            in_m[v] = true;
        } else if after != before {
            switches_to[v] = Some(after);
        }
    }
    ManipulableSet { target, in_m, switches_to }
}

/// Expected weighted spread of a seed set.
pub trait SpreadOracle {
    fn n(&self) -> usize;
    fn spread(&mut self, seeds: &[usize]) -> f64;
}

/// Spread estimated by repeated cascades.
#[derive(Debug)]
pub struct MonteCarloSpread<'a, R> {
    net: &'a SocialNetwork,
    weights: &'a [bool],
    runs: u64,
    rng: R,
    sim: IcSimulator,
}

impl<'a, R: Rng> MonteCarloSpread<'a, R> {
    pub fn new(net: &'a SocialNetwork, weights: &'a [bool], runs: u64, rng: R) -> Self {
        MonteCarloSpread { net, weights, runs, rng, sim: IcSimulator::new(net.n()) }
    }
}

impl<R: Rng> SpreadOracle for MonteCarloSpread<'_, R> {
    fn n(&self) -> usize {
        self.net.n()
    }

    fn spread(&mut self, seeds: &[usize]) -> f64 {
        estimate_sigma_w_with(&mut self.sim, self.net, self.weights, seeds, self.runs, &mut self.rng)
    }
}

/// Spread computed exactly over all live graphs.
#[derive(Debug)]
pub struct ExactSpread<'a> {
    ensemble: &'a ReachEnsemble,
    weight_mask: u64,
}

impl<'a> ExactSpread<'a> {
    pub fn new(ensemble: &'a ReachEnsemble, weight_mask: u64) -> Self {
        ExactSpread { ensemble, weight_mask }
    }
}

impl SpreadOracle for ExactSpread<'_> {
    fn n(&self) -> usize {
        self.ensemble.n()
    }

    fn spread(&mut self, seeds: &[usize]) -> f64 {
        let w = self.weight_mask;
        self.ensemble.expectation(seeds, |mask| (mask & w).count_ones() as f64)
    }
}

/// Seeds in selection order and the marginal gain credited to each.
#[derive(Debug, Clone, PartialEq)]
pub struct GreedyOutcome {
    pub seeds: Vec<usize>,
    pub gains: Vec<f64>,
    pub spread: f64,
}

/// Hill-climbing: add the node with the largest marginal spread, `min(B, n)`
/// times; ties go to the smaller id. `lazy` reuses stale gains as upper bounds.
pub fn greedy_seed_selection<O: SpreadOracle + ?Sized>(oracle: &mut O, budget: usize, lazy: bool) -> GreedyOutcome {
    let k = budget.min(oracle.n());
    if lazy {
        lazy_greedy(oracle, k)
    } else {
        plain_greedy(oracle, k)
    }
}

fn plain_greedy<O: SpreadOracle + ?Sized>(oracle: &mut O, k: usize) -> GreedyOutcome {
    let n = oracle.n();
    let mut chosen = vec![false; n];
    let mut seeds = Vec::with_capacity(k);
    let mut gains = Vec::with_capacity(k);
    let mut current = 0.0;
    for _ in 0..k {
        let mut best: Option<(usize, f64)> = None;
        for v in 0..n {
            if chosen[v] {
                continue;
            }
            seeds.push(v);
            let value = oracle.spread(&seeds);
            seeds.pop();
            if best.is_none_or(|(_, b)| value > b) {
                best = Some((v, value));
            }
        }
        let (v, value) = best.expect("fewer seeds than nodes");
        chosen[v] = true;
        seeds.push(v);
        gains.push(value - current);
        current = value;
    }
    GreedyOutcome { seeds, gains, spread: current }
}

#[derive(Debug, PartialEq)]
struct Entry {
    gain: f64,
    node: usize,
    round: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.gain.total_cmp(&other.gain).then(other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn lazy_greedy<O: SpreadOracle + ?Sized>(oracle: &mut O, k: usize) -> GreedyOutcome {
    let n = oracle.n();
    let mut heap: BinaryHeap<Entry> = (0..n).map(|v| Entry { gain: oracle.spread(&[v]), node: v, round: 0 }).collect();
    let mut seeds = Vec::with_capacity(k);
    let mut gains = Vec::with_capacity(k);
    let mut current = 0.0;
    while seeds.len() < k {
        let top = heap.pop().expect("fewer seeds than nodes");
        if top.round == seeds.len() {
            current += top.gain;
            seeds.push(top.node);
            gains.push(top.gain);
            continue;
        }
        seeds.push(top.node);
        let gain = oracle.spread(&seeds) - current;
        seeds.pop();
        heap.push(Entry { gain, node: top.node, round: seeds.len() });
    }
    GreedyOutcome { seeds, gains, spread: current }
}

/// Greedy over the manipulable voters with Monte Carlo spread estimates.
pub fn greedy_apx<R: Rng>(scenario: &Scenario, budget: usize, runs: u64, lazy: bool, rng: R) -> Vec<usize> {
    let m = manipulable_set(&scenario.electorate, scenario.delta);
    let mut oracle = MonteCarloSpread::new(&scenario.network, m.weights(), runs, rng);
    greedy_seed_selection(&mut oracle, budget, lazy).seeds
}

/// Largest number of activated voters switching to the same opponent.
fn max_collateral(
    m: &ManipulableSet,
    n_candidates: usize,
    activated: impl Iterator<Item = usize>,
    counts: &mut Vec<usize>,
) -> usize {
    counts.clear();
    counts.resize(n_candidates, 0);
    for v in activated {
        if let Some(c) = m.collateral_of(v) {
            counts[c] += 1;
        }
    }
    counts.iter().copied().max().unwrap_or(0)
}

/// Monte Carlo estimate of the expected largest collateral gain of any opponent.
pub fn x_of_s<R: Rng + ?Sized>(scenario: &Scenario, seeds: &[usize], runs: u64, rng: &mut R) -> f64 {
    if seeds.is_empty() || runs == 0 {
        return 0.0;
    }
    let m = manipulable_set(&scenario.electorate, scenario.delta);
    let k = scenario.electorate.n_candidates();
    let mut sim = IcSimulator::new(scenario.n());
    let mut counts = Vec::new();
    let mut acc = crate::num::CompensatedSum::new();
    for _ in 0..runs {
        let activated = sim.run(&scenario.network, seeds, rng);
        acc.add(max_collateral(&m, k, activated.iter().copied(), &mut counts) as f64);
    }
    acc.total() / runs as f64
}

/// Exact counterpart of [`x_of_s`].
pub fn exact_x_of_s(scenario: &Scenario, ensemble: &ReachEnsemble, seeds: &[usize]) -> f64 {
    let m = manipulable_set(&scenario.electorate, scenario.delta);
    let k = scenario.electorate.n_candidates();
    let mut counts = Vec::new();
    ensemble.expectation(seeds, |mask| max_collateral(&m, k, MaskIter(mask), &mut counts) as f64)
}

/// Exact expected change in margin for `seeds`.
pub fn exact_expected_dmov(scenario: &Scenario, ensemble: &ReachEnsemble, seeds: &[usize]) -> f64 {
    if seeds.is_empty() {
        return 0.0;
    }
    let mut eval = scenario.dmov_evaluator();
    ensemble.expectation(seeds, |mask| eval.dmov_mask(mask) as f64)
}

/// `C(n, k)` as a float.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Call `f` on every `k`-subset of `0..n`, in lexicographic order.
pub fn for_each_subset<F: FnMut(&[usize])>(n: usize, k: usize, mut f: F) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] < n - k + i {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn check_brute_force(n: usize, budget: usize, edges: usize) -> Result<()> {
    let work = binomial(n, budget.min(n)) * libm::pow(2.0, edges as f64);
    if work > BRUTE_FORCE_LIMIT {
        return Err(Error::capability(alloc::format!(
            "brute force over C({n}, {budget}) seed sets and 2^{edges} live graphs is too large"
        )));
    }
    Ok(())
}

/// Best seed set of size at most `budget` by exact expected change in margin.
/// Ties go to the smaller set, then the lexicographically first.
pub fn brute_force_optimal(scenario: &Scenario, budget: usize) -> Result<(Vec<usize>, f64)> {
    if budget == 0 {
        return Ok((Vec::new(), 0.0));
    }
    let n = scenario.n();
    check_brute_force(n, budget, scenario.network.edge_count())?;
    let ensemble = ReachEnsemble::build(&scenario.network)?;
    let mut eval = scenario.dmov_evaluator();
    let mut best: (Vec<usize>, f64) = (Vec::new(), 0.0);
    for size in 1..=budget.min(n) {
        for_each_subset(n, size, |seeds| {
            let value = ensemble.expectation(seeds, |mask| eval.dmov_mask(mask) as f64);
            if value > best.1 + 1e-12 {
                best = (seeds.to_vec(), value);
            }
        });
    }
    Ok(best)
}

/// Largest exact spread over seed sets of size `min(budget, n)`.
pub fn optimal_spread<O: SpreadOracle + ?Sized>(oracle: &mut O, budget: usize) -> (Vec<usize>, f64) {
    let n = oracle.n();
    let mut best: (Vec<usize>, f64) = (Vec::new(), f64::NEG_INFINITY);
    for_each_subset(n, budget.min(n), |seeds| {
        let value = oracle.spread(seeds);
        if value > best.1 {
            best = (seeds.to_vec(), value);
        }
    });
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;
    use crate::stream::stream_rng;

    #[test]
    fn subset_enumeration_counts() {
        for n in 0..8 {
            for k in 0..=n {
                let mut count = 0;
                let mut last: Option<Vec<usize>> = None;
                for_each_subset(n, k, |s| {
                    assert_eq!(s.len(), k);
                    assert!(s.windows(2).all(|w| w[0] < w[1]));
                    if let Some(prev) = &last {
                        assert!(prev.as_slice() < s);
                    }
                    last = Some(s.to_vec());
                    count += 1;
                });
                assert_eq!(count as f64, binomial(n, k), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn classification_example() {
        // Voter at 0.25, target at 0, rival at 0.6.
        let e = Electorate::from_positions(&[0.0, 0.6], &[0.25, 0.0, 0.5], None, 0).unwrap();
        let m = manipulable_set(&e, 0.3);
        assert!(!m.contains(0) && !m.contains(1));
        let e = Electorate::from_positions(&[0.0, 0.6], &[0.35, 0.0], None, 0).unwrap();
        let m = manipulable_set(&e, 0.3);
        assert!(m.contains(0));
        assert!(!m.contains(1));
        assert_eq!(m.collateral_of(1), None);
    }

    #[test]
    fn collateral_switch_is_detected() {
        // Voter at 0.9 votes for 1.0; moving 0.3 towards -1 lands at 0.6,
        // now closest to the candidate at 0.5.
        let e = Electorate::from_positions(&[-1.0, 0.5, 1.0], &[0.9], None, 0).unwrap();
        let m = manipulable_set(&e, 0.3);
        assert!(!m.contains(0));
        assert_eq!(m.collateral_of(0), Some(1));
        assert_eq!(m.collateral(1), vec![0]);
    }

    #[test]
    fn star_center_wins() {
        let edges: Vec<Edge> = (1..6).map(|t| Edge { source: 0, target: t, probability: 1.0 }).collect();
        let net = SocialNetwork::from_edges(6, &edges).unwrap();
        let weights = [false, true, true, true, true, true];
        let ens = ReachEnsemble::build(&net).unwrap();
        let mut exact = ExactSpread::new(&ens, 0b111110);
        assert_eq!(greedy_seed_selection(&mut exact, 1, false).seeds, vec![0]);
        let mut mc = MonteCarloSpread::new(&net, &weights, 50, stream_rng(1, &[]));
        assert_eq!(greedy_seed_selection(&mut mc, 1, true).seeds, vec![0]);
    }

    #[test]
    fn budget_above_n_takes_everything() {
        let net = SocialNetwork::empty(4);
        let ens = ReachEnsemble::build(&net).unwrap();
        let mut exact = ExactSpread::new(&ens, 0b1010);
        let out = greedy_seed_selection(&mut exact, 10, false);
        let mut s = out.seeds.clone();
        s.sort_unstable();
        assert_eq!(s, vec![0, 1, 2, 3]);
        assert_eq!(out.spread, 2.0);
    }

    #[test]
    fn lazy_and_plain_agree_exactly() {
        let mut rng = stream_rng(2, &[]);
        for _ in 0..50 {
            let n = 7;
            let mut edges = Vec::new();
            for u in 0..n {
                for v in 0..n {
                    if u != v && edges.len() < 10 && rng.random::<f64>() < 0.25 {
                        edges.push(Edge { source: u, target: v, probability: rng.random() });
                    }
                }
            }
            let net = SocialNetwork::from_edges(n, &edges).unwrap();
            let ens = ReachEnsemble::build(&net).unwrap();
            let w: u64 = rng.random_range(0..1 << n);
            let a = greedy_seed_selection(&mut ExactSpread::new(&ens, w), 3, false);
            let b = greedy_seed_selection(&mut ExactSpread::new(&ens, w), 3, true);
            assert!((a.spread - b.spread).abs() < 1e-9);
        }
    }

    #[test]
    fn brute_force_without_spread() {
        let e = Electorate::from_positions(&[0.0, 0.6], &[0.35, 0.4, 0.9, 0.1], None, 0).unwrap();
        let net = crate::graph::with_constant_probability(
            &SocialNetwork::from_edges(
                4,
                &[Edge { source: 0, target: 1, probability: 1.0 }, Edge { source: 2, target: 3, probability: 1.0 }],
            )
            .unwrap(),
            0.0,
        )
        .unwrap();
        let s = Scenario::new(e, net, 0.3).unwrap();
        assert_eq!(brute_force_optimal(&s, 0).unwrap(), (Vec::new(), 0.0));
        let (seeds, value) = brute_force_optimal(&s, 1).unwrap();
        // Converting one rival voter swings the margin by two.
        assert_eq!(seeds, vec![0]);
        assert_eq!(value, 2.0);
    }
}
