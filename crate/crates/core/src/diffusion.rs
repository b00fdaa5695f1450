//! Independent Cascade diffusion and its live-graph view.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::graph::SocialNetwork;
use crate::{Error, Result};

/// Most edges [`enumerate_live_graphs`] will expand.
pub const MAX_ENUMERABLE_EDGES: usize = 20;

/// Outcome of one cascade.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActivationResult {
    /// Activated nodes, ascending.
    pub activated: Vec<usize>,
    /// Steps that activated at least one new node.
    pub rounds: usize,
}

/// Reusable cascade workspace; a run costs O(activated out-edges), not O(n).
#[derive(Debug, Clone)]
pub struct IcSimulator {
    stamp: Vec<u32>,
    epoch: u32,
    frontier: Vec<usize>,
    next: Vec<usize>,
    activated: Vec<usize>,
    rounds: usize,
}

impl IcSimulator {
    pub fn new(n: usize) -> Self {
        IcSimulator {
            stamp: vec![0; n],
            epoch: 0,
            frontier: Vec::new(),
            next: Vec::new(),
            activated: Vec::new(),
            rounds: 0,
        }
    }

    fn reset(&mut self, n: usize) {
        if self.stamp.len() != n {
            self.stamp = vec![0; n];
            self.epoch = 0;
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        self.frontier.clear();
        self.next.clear();
        self.activated.clear();
        self.rounds = 0;
    }

    fn activate(&mut self, v: usize) -> bool {
        if self.stamp[v] == self.epoch {
            return false;
        }
        self.stamp[v] = self.epoch;
        self.activated.push(v);
        true
    }

    /// Run one cascade from `seeds`; returns the activated nodes in
    /// activation order (seeds first, ascending).
    pub fn run<R: Rng + ?Sized>(&mut self, net: &SocialNetwork, seeds: &[usize], rng: &mut R) -> &[usize] {
        self.run_observed(net, seeds, rng, |_| {})
    }

    /// As [`Self::run`], reporting the index of every edge whose coin is flipped.
    pub fn run_observed<R, F>(&mut self, net: &SocialNetwork, seeds: &[usize], rng: &mut R, mut observe: F) -> &[usize]
    where
        R: Rng + ?Sized,
        F: FnMut(usize),
    {
        self.reset(net.n());
        let mut sorted = seeds.to_vec();
        sorted.sort_unstable();
        for s in sorted {
            if self.activate(s) {
                self.frontier.push(s);
            }
        }
        while !self.frontier.is_empty() {
            let frontier = core::mem::take(&mut self.frontier);
            for &u in &frontier {
                for e in net.edge_range(u) {
                    let v = net.target(e);
                    if self.stamp[v] == self.epoch {
                        continue;
                    }
                    observe(e);
                    let p = net.probability(e);
                    let fires = if p >= 1.0 {
                        true
                    } else if p <= 0.0 {
                        false
                    } else {
                        rng.random::<f64>() < p
                    };
                    if fires && self.activate(v) {
                        self.next.push(v);
                    }
                }
            }
            self.frontier = frontier;
            self.frontier.clear();
            core::mem::swap(&mut self.frontier, &mut self.next);
            self.frontier.sort_unstable();
            if !self.frontier.is_empty() {
                self.rounds += 1;
            }
        }
        &self.activated
    }

    /// Nodes activated by the last run, in activation order.
    pub fn activated(&self) -> &[usize] {
        &self.activated
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn is_active(&self, v: usize) -> bool {
        self.stamp[v] == self.epoch
    }

    pub fn result(&self) -> ActivationResult {
        let mut activated = self.activated.clone();
        activated.sort_unstable();
        ActivationResult { activated, rounds: self.rounds }
    }
}

/// One Independent Cascade run from `seeds`.
pub fn simulate_ic<R: Rng + ?Sized>(net: &SocialNetwork, seeds: &[usize], rng: &mut R) -> ActivationResult {
    let mut sim = IcSimulator::new(net.n());
    sim.run(net, seeds, rng);
    sim.result()
}

/// Subgraph keeping each edge independently with its probability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiveGraph {
    kept: Vec<bool>,
}

impl LiveGraph {
    pub fn from_mask(kept: Vec<bool>) -> Self {
        LiveGraph { kept }
    }

    pub fn kept(&self) -> &[bool] {
        &self.kept
    }

    pub fn is_kept(&self, e: usize) -> bool {
        self.kept[e]
    }

    /// Probability of drawing exactly this live graph.
    pub fn probability(&self, net: &SocialNetwork) -> f64 {
        self.kept
            .iter()
            .enumerate()
            .map(|(e, &k)| if k { net.probability(e) } else { 1.0 - net.probability(e) })
            .product()
    }

    /// Nodes reachable from `seeds` along kept edges, ascending.
    pub fn reachable(&self, net: &SocialNetwork, seeds: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; net.n()];
        let mut stack = Vec::new();
        for &s in seeds {
            if !seen[s] {
                seen[s] = true;
                stack.push(s);
            }
        }
        while let Some(u) = stack.pop() {
            for e in net.edge_range(u) {
                let v = net.target(e);
                if self.kept[e] && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        (0..net.n()).filter(|&v| seen[v]).collect()
    }
}

/// Draw a live graph.
pub fn sample_live_graph<R: Rng + ?Sized>(net: &SocialNetwork, rng: &mut R) -> LiveGraph {
    LiveGraph { kept: net.probabilities().iter().map(|&p| rng.random::<f64>() < p).collect() }
}

/// Every live graph with its probability, in binary-counter order over edges.
pub fn enumerate_live_graphs(net: &SocialNetwork) -> Result<Vec<(LiveGraph, f64)>> {
    let m = net.edge_count();
    check_enumerable(m)?;
    Ok((0..1u64 << m)
        .map(|mask| {
            let lg = LiveGraph { kept: (0..m).map(|e| mask >> e & 1 == 1).collect() };
            let p = lg.probability(net);
            (lg, p)
        })
        .collect())
}

fn check_enumerable(edges: usize) -> Result<()> {
    if edges > MAX_ENUMERABLE_EDGES {
        return Err(Error::capability(alloc::format!(
            "live-graph enumeration supports at most {MAX_ENUMERABLE_EDGES} edges, got {edges}"
        )));
    }
    Ok(())
}

/// Precomputed reachability of every node in every live graph of a tiny
/// network, as bitmasks. Supports exact expectations over cascades.
#[derive(Debug, Clone)]
pub struct ReachEnsemble {
    n: usize,
    probabilities: Vec<f64>,
    reach: Vec<u64>,
}

impl ReachEnsemble {
    /// Requires at most 64 nodes and [`MAX_ENUMERABLE_EDGES`] edges.
    /// Live graphs of probability zero are dropped.
    pub fn build(net: &SocialNetwork) -> Result<Self> {
        let n = net.n();
        let m = net.edge_count();
        if n > 64 {
            return Err(Error::capability("exact reachability supports at most 64 nodes"));
        }
        check_enumerable(m)?;
        let mut probabilities = Vec::new();
        let mut reach = Vec::new();
        let mut stack = Vec::with_capacity(n);
        for mask in 0..1u64 << m {
            let mut p = 1.0;
            for e in 0..m {
                let q = net.probability(e);
                p *= if mask >> e & 1 == 1 { q } else { 1.0 - q };
            }
            if p == 0.0 {
                continue;
            }
            probabilities.push(p);
            for s in 0..n {
                let mut seen = 1u64 << s;
                stack.clear();
                stack.push(s);
                while let Some(u) = stack.pop() {
                    for e in net.edge_range(u) {
                        let v = net.target(e);
                        if mask >> e & 1 == 1 && seen >> v & 1 == 0 {
                            seen |= 1 << v;
                            stack.push(v);
                        }
                    }
                }
                reach.push(seen);
            }
        }
        Ok(ReachEnsemble { n, probabilities, reach })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of live graphs with positive probability.
    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn probability(&self, graph: usize) -> f64 {
        self.probabilities[graph]
    }

    /// Bitmask of nodes reachable from `seeds` in live graph `graph`.
    pub fn reach_mask(&self, graph: usize, seeds: &[usize]) -> u64 {
        let row = &self.reach[graph * self.n..(graph + 1) * self.n];
        seeds.iter().fold(0, |acc, &s| acc | row[s])
    }

    /// Exact `E[f(activated mask)]` over all live graphs.
    pub fn expectation<F: FnMut(u64) -> f64>(&self, seeds: &[usize], mut f: F) -> f64 {
        let mut acc = crate::num::CompensatedSum::new();
        for g in 0..self.len() {
            acc.add(self.probabilities[g] * f(self.reach_mask(g, seeds)));
        }
        acc.total()
    }

    /// Exact distribution of the activated set: `(mask, probability)` pairs,
    /// one per distinct outcome, ascending by mask.
    pub fn distribution(&self, seeds: &[usize]) -> Vec<(u64, f64)> {
        let mut outcomes: alloc::collections::BTreeMap<u64, f64> = alloc::collections::BTreeMap::new();
        for g in 0..self.len() {
            *outcomes.entry(self.reach_mask(g, seeds)).or_insert(0.0) += self.probabilities[g];
        }
        outcomes.into_iter().collect()
    }
}

/// Convert an ascending node list to a bitmask (nodes below 64 only).
pub fn to_mask(nodes: &[usize]) -> u64 {
    nodes.iter().fold(0, |acc, &v| acc | 1 << v)
}
