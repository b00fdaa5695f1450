//! Fast seed-selection heuristics: neighbourhood scoring and weighted PageRank.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::graph::SocialNetwork;
use crate::greedy::{manipulable_set, ManipulableSet};
use crate::model::{apply_influence, Electorate};
use crate::num::population_std;
use crate::scenario::Scenario;
use crate::{Error, Result};

/// Denominators at or below this make the gain-based distance infinite.
pub const DEGENERATE_GAIN: f64 = 1e-12;

/// Which nodes count as the neighbourhood of a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NeighborhoodSpec {
    pub max_hops: usize,
    /// Keep at most this many nodes, nearest first (ties by id).
    pub max_size: Option<usize>,
}

impl NeighborhoodSpec {
    pub fn hops(max_hops: usize) -> Self {
        NeighborhoodSpec { max_hops, max_size: None }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_hops == 0 {
            return Err(Error::config("neighbourhoods need at least one hop"));
        }
        if self.max_size == Some(0) {
            return Err(Error::config("neighbourhood size cap must be at least 1"));
        }
        Ok(())
    }
}

/// How structural and political scores are turned into a ranking.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Combiner {
    /// Structural score first, political score breaks ties.
    LexGP,
    /// Political score first, structural score breaks ties.
    LexPG,
    /// `alpha * political / std + (1 - alpha) * structural / std`.
    Merge(f64),
}

/// Political distance of a voter from the target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoliticalDistance {
    /// 0 for target supporters, otherwise the distance on the spectrum.
    Standard,
    /// 1 on the manipulable set, 0 for target supporters, infinite otherwise.
    ManipEq1,
    /// As `ManipEq1`, but other voters get distance over distance gained.
    ManipStar,
}

/// Which distances take part in the political score.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Filter {
    Positive,
    EqOne,
}

impl Filter {
    pub fn accepts(self, d: f64) -> bool {
        match self {
            Filter::Positive => d > 0.0,
            Filter::EqOne => d == 1.0,
        }
    }
}

/// Political distance of every voter from the target, as the manipulator
/// sees it: true positions and predicted votes.
pub fn political_distances(
    electorate: &Electorate,
    delta: f64,
    kind: PoliticalDistance,
    m: Option<&ManipulableSet>,
) -> Vec<f64> {
    let target = electorate.target();
    let xt = electorate.candidate_positions()[target];
    let owned;
    let m = match (kind, m) {
        (PoliticalDistance::Standard, _) => None,
        (_, Some(m)) => Some(m),
        (_, None) => {
            owned = manipulable_set(electorate, delta);
            Some(&owned)
        }
    };
    (0..electorate.n_voters())
        .map(|v| {
            if electorate.predicted_vote(v) == target {
                return 0.0;
            }
            let x = electorate.position(v);
            let d = (x - xt).abs();
            match kind {
                PoliticalDistance::Standard => d,
                _ if m.is_some_and(|m| m.contains(v)) => 1.0,
                PoliticalDistance::ManipEq1 => f64::INFINITY,
                PoliticalDistance::ManipStar => {
                    let gain = d - (apply_influence(x, xt, delta) - xt).abs();
                    if gain <= DEGENERATE_GAIN {
                        f64::INFINITY
                    } else {
                        d / gain
                    }
                }
            }
        })
        .collect()
}

/// One neighbourhood member: node, hop distance and best path probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub node: usize,
    pub hops: usize,
    pub weight: f64,
}

/// Breadth-first neighbourhood walker with reusable buffers.
#[derive(Debug, Clone)]
pub struct NeighborhoodScorer {
    spec: NeighborhoodSpec,
    stamp: Vec<u32>,
    epoch: u32,
    best: Vec<f64>,
    level: Vec<usize>,
    layer: Vec<usize>,
    next: Vec<usize>,
    members: Vec<Neighbor>,
    edge_visits: u64,
}

impl NeighborhoodScorer {
    pub fn new(n: usize, spec: NeighborhoodSpec) -> Result<Self> {
        spec.validate()?;
        Ok(NeighborhoodScorer {
            spec,
            stamp: vec![0; n],
            epoch: 0,
            best: vec![0.0; n],
            level: vec![0; n],
            layer: Vec::new(),
            next: Vec::new(),
            members: Vec::new(),
            edge_visits: 0,
        })
    }

    /// Edges inspected since construction.
    pub fn edge_visits(&self) -> u64 {
        self.edge_visits
    }

    /// Neighbourhood of `v`, excluding `v`, ordered by hops then id. The
    /// weight is the largest probability product over shortest paths.
    pub fn neighborhood(&mut self, net: &SocialNetwork, v: usize) -> &[Neighbor] {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        let epoch = self.epoch;
        self.members.clear();
        self.layer.clear();
        self.layer.push(v);
        self.stamp[v] = epoch;
        self.best[v] = 1.0;
        self.level[v] = 0;
        let cap = self.spec.max_size.unwrap_or(usize::MAX);
        'outer: for hop in 1..=self.spec.max_hops {
            self.next.clear();
            for &u in &self.layer {
                let wu = self.best[u];
                for e in net.edge_range(u) {
                    self.edge_visits += 1;
                    let x = net.target(e);
                    let w = wu * net.probability(e);
                    if self.stamp[x] != epoch {
                        self.stamp[x] = epoch;
                        self.best[x] = w;
                        self.level[x] = hop;
                        self.next.push(x);
                    } else if self.level[x] == hop && w > self.best[x] {
                        self.best[x] = w;
                    }
                }
            }
            if self.next.is_empty() {
                break;
            }
            self.next.sort_unstable();
            for &x in &self.next {
                if self.members.len() >= cap {
                    break 'outer;
                }
                self.members.push(Neighbor { node: x, hops: hop, weight: self.best[x] });
            }
            core::mem::swap(&mut self.layer, &mut self.next);
        }
        &self.members
    }

    /// Structural and political score of `v`.
    pub fn scores(&mut self, net: &SocialNetwork, v: usize, distances: &[f64], filter: Filter) -> (f64, f64) {
        let own = political_term(1.0, distances[v], filter);
        let members = self.neighborhood(net, v);
        let mut structural = 0.0;
        let mut political = own;
        for nb in members {
            structural += 1.0 / nb.hops as f64;
            political += political_term(nb.weight, distances[nb.node], filter);
        }
        (structural, political)
    }

    /// Structural and political scores of every node.
    pub fn all_scores(&mut self, net: &SocialNetwork, distances: &[f64], filter: Filter) -> (Vec<f64>, Vec<f64>) {
        let mut sg = Vec::with_capacity(net.n());
        let mut sp = Vec::with_capacity(net.n());
        for v in 0..net.n() {
            let (g, p) = self.scores(net, v, distances, filter);
            sg.push(g);
            sp.push(p);
        }
        (sg, sp)
    }
}

fn political_term(weight: f64, d: f64, filter: Filter) -> f64 {
    if !filter.accepts(d) {
        return 0.0;
    }
    debug_assert!(d > 0.0);
    if d.is_infinite() {
        0.0
    } else {
        weight / d
    }
}

/// Sum of inverse hop distances over the neighbourhood of `v`.
pub fn structural_score(net: &SocialNetwork, v: usize, spec: NeighborhoodSpec) -> Result<f64> {
    let mut s = NeighborhoodScorer::new(net.n(), spec)?;
    Ok(s.neighborhood(net, v).iter().map(|nb| 1.0 / nb.hops as f64).sum())
}

/// Path-weighted sum of inverse political distances over `v` and its
/// neighbourhood, restricted to voters passing `filter`.
pub fn political_score(
    net: &SocialNetwork,
    v: usize,
    spec: NeighborhoodSpec,
    distances: &[f64],
    filter: Filter,
) -> Result<f64> {
    let mut s = NeighborhoodScorer::new(net.n(), spec)?;
    Ok(s.scores(net, v, distances, filter).1)
}

fn standardized(scores: &[f64]) -> Vec<f64> {
    let sd = population_std(scores);
    if sd > 0.0 {
        scores.iter().map(|s| s / sd).collect()
    } else {
        vec![0.0; scores.len()]
    }
}

/// `alpha * s_P / std(s_P) + (1 - alpha) * s_G / std(s_G)`; a constant score
/// standardizes to zero.
pub fn merged_scores(structural: &[f64], political: &[f64], alpha: f64) -> Vec<f64> {
    let g = standardized(structural);
    let p = standardized(political);
    g.iter().zip(&p).map(|(g, p)| alpha * p + (1.0 - alpha) * g).collect()
}

/// All nodes from best to worst; remaining ties go to the smaller id.
pub fn combine_and_rank(structural: &[f64], political: &[f64], combiner: Combiner) -> Vec<usize> {
    let mut order: Vec<usize> = (0..structural.len()).collect();
    match combiner {
        Combiner::LexGP => order.sort_by(|&a, &b| {
            structural[b].total_cmp(&structural[a]).then(political[b].total_cmp(&political[a])).then(a.cmp(&b))
        }),
        Combiner::LexPG => order.sort_by(|&a, &b| {
            political[b].total_cmp(&political[a]).then(structural[b].total_cmp(&structural[a])).then(a.cmp(&b))
        }),
        Combiner::Merge(alpha) => {
            let s = merged_scores(structural, political, alpha);
            order = rank_descending(&s);
        }
    }
    order
}

/// Node ids by decreasing score, ties by id.
pub fn rank_descending(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order
}

/// Power-iteration settings for [`weighted_pagerank`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PageRankOptions {
    pub damping: f64,
    pub tolerance: f64,
    pub max_iters: usize,
    /// Multiply each neighbour weight by the probability of the edge to it.
    pub weight_by_probability: bool,
}

impl Default for PageRankOptions {
    fn default() -> Self {
        PageRankOptions { damping: 0.85, tolerance: 1e-10, max_iters: 200, weight_by_probability: false }
    }
}

impl PageRankOptions {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.damping) {
            return Err(Error::config("damping must lie in [0, 1)"));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::config("tolerance must be positive"));
        }
        Ok(())
    }
}

/// Result of [`weighted_pagerank`].
#[derive(Debug, Clone, PartialEq)]
pub struct PageRank {
    pub ranks: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// PageRank where each node shares its rank among out-neighbours in
/// proportion to their weight `z`. A node whose neighbours all weigh zero
/// shares uniformly; nodes without out-edges spread rank over everyone.
pub fn weighted_pagerank(net: &SocialNetwork, z: &[f64], options: PageRankOptions) -> Result<PageRank> {
    options.validate()?;
    let n = net.n();
    if z.len() != n {
        return Err(Error::config("one weight per node is required"));
    }
    if z.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
        return Err(Error::config("pagerank weights must be finite and non-negative"));
    }
    if n == 0 {
        return Ok(PageRank { ranks: Vec::new(), iterations: 0, converged: true });
    }
    let edge_weight = |e: usize| {
        let w = z[net.target(e)];
        if options.weight_by_probability {
            w * net.probability(e)
        } else {
            w
        }
    };
    let totals: Vec<f64> = (0..n).map(|u| net.edge_range(u).map(edge_weight).sum()).collect();
    let s = options.damping;
    let inv_n = 1.0 / n as f64;
    let mut ranks = vec![inv_n; n];
    let mut next = vec![0.0; n];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < options.max_iters {
        iterations += 1;
        let mut dangling = 0.0;
        next.iter_mut().for_each(|x| *x = 0.0);
        for u in 0..n {
            let r = ranks[u];
            let range = net.edge_range(u);
            if range.is_empty() {
                dangling += r;
            } else if totals[u] > 0.0 {
                let share = s * r / totals[u];
                for e in range {
                    next[net.target(e)] += share * edge_weight(e);
                }
            } else {
                let share = s * r / range.len() as f64;
                for e in range {
                    next[net.target(e)] += share;
                }
            }
        }
        let base = (1.0 - s) * inv_n + s * dangling * inv_n;
        let mut change = 0.0;
        for v in 0..n {
            next[v] += base;
            change += (next[v] - ranks[v]).abs();
        }
        core::mem::swap(&mut ranks, &mut next);
        if change < options.tolerance {
            converged = true;
            break;
        }
    }
    Ok(PageRank { ranks, iterations, converged })
}

/// Configuration behind a catalog name.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HeuristicKind {
    Neighborhood { hops: usize, combiner: Combiner },
    PageRank { alpha: f64, hops: usize, distance: PoliticalDistance, filter: Filter },
}

/// A named heuristic from the catalog.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Heuristic {
    pub name: &'static str,
    pub kind: HeuristicKind,
}

const fn neighborhood(name: &'static str, hops: usize, combiner: Combiner) -> Heuristic {
    Heuristic { name, kind: HeuristicKind::Neighborhood { hops, combiner } }
}

const fn pagerank(
    name: &'static str,
    alpha: f64,
    hops: usize,
    distance: PoliticalDistance,
    filter: Filter,
) -> Heuristic {
    Heuristic { name, kind: HeuristicKind::PageRank { alpha, hops, distance, filter } }
}

/// Every named heuristic.
pub const CATALOG: [Heuristic; 11] = [
    neighborhood("SPoutdeg", 1, Combiner::LexGP),
    neighborhood("SPoutdeg_rev", 1, Combiner::LexPG),
    neighborhood("SPoutdeg_merge0.5", 1, Combiner::Merge(0.5)),
    neighborhood("SPneig2", 2, Combiner::LexGP),
    neighborhood("SPneig2_rev", 2, Combiner::LexPG),
    neighborhood("SPneig2_merge0.5", 2, Combiner::Merge(0.5)),
    pagerank("SPpagerank1.0_pos", 1.0, 1, PoliticalDistance::Standard, Filter::Positive),
    pagerank("SPpagerank0.5_pos", 0.5, 1, PoliticalDistance::Standard, Filter::Positive),
    pagerank("SPpagerank1.0_hop2_pos", 1.0, 2, PoliticalDistance::Standard, Filter::Positive),
    pagerank("SPpagerank1.0_manip_eq1", 1.0, 1, PoliticalDistance::ManipEq1, Filter::EqOne),
    pagerank("SPpagerank1.0_manip*_pos", 1.0, 1, PoliticalDistance::ManipStar, Filter::Positive),
];

impl Heuristic {
    /// Look up a catalog name; `manipstar` may stand for `manip*`.
    pub fn by_name(name: &str) -> Result<Heuristic> {
        let normalized = name.replace("manipstar", "manip*");
        CATALOG
            .iter()
            .find(|h| h.name == normalized)
            .copied()
            .ok_or_else(|| Error::config(alloc::format!("unknown heuristic `{name}`")))
    }

    /// Rank every node, best first.
    pub fn rank(&self, scenario: &Scenario, options: PageRankOptions) -> Result<Vec<usize>> {
        let net = &scenario.network;
        match self.kind {
            HeuristicKind::Neighborhood { hops, combiner } => {
                let d = political_distances(&scenario.electorate, scenario.delta, PoliticalDistance::Standard, None);
                let mut scorer = NeighborhoodScorer::new(net.n(), NeighborhoodSpec::hops(hops))?;
                let (sg, sp) = scorer.all_scores(net, &d, Filter::Positive);
                Ok(combine_and_rank(&sg, &sp, combiner))
            }
            HeuristicKind::PageRank { alpha, hops, distance, filter } => {
                let d = political_distances(&scenario.electorate, scenario.delta, distance, None);
                let mut scorer = NeighborhoodScorer::new(net.n(), NeighborhoodSpec::hops(hops))?;
                let (sg, sp) = scorer.all_scores(net, &d, filter);
                let z = merged_scores(&sg, &sp, alpha);
                let pr = weighted_pagerank(net, &z, options)?;
                Ok(rank_descending(&pr.ranks))
            }
        }
    }

    /// The top `min(budget, n)` nodes.
    pub fn select(&self, scenario: &Scenario, budget: usize, options: PageRankOptions) -> Result<Vec<usize>> {
        let mut order = self.rank(scenario, options)?;
        order.truncate(budget);
        Ok(order)
    }
}

impl fmt::Display for Heuristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name)
    }
}

impl FromStr for Heuristic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Heuristic::by_name(s)
    }
}

/// Seeds chosen by the catalog heuristic `name` with default PageRank settings.
pub fn run_named_heuristic(name: &str, scenario: &Scenario, budget: usize) -> Result<Vec<usize>> {
    Heuristic::by_name(name)?.select(scenario, budget, PageRankOptions::default())
}
