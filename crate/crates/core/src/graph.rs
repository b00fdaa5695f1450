//! Directed probabilistic social networks and their generators.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use rand::Rng;

use crate::{Error, Result};

/// A directed edge carrying an activation probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub probability: f64,
}

/// Directed network in compressed sparse row form. Out-edges of each node are
/// stored by ascending target, so edge indices follow `(source, target)` order.
#[derive(Debug, Clone, PartialEq)]
pub struct SocialNetwork {
    n: usize,
    offsets: Vec<usize>,
    sources: Vec<usize>,
    targets: Vec<usize>,
    probs: Vec<f64>,
}

impl SocialNetwork {
    /// Build from an edge list. Rejects self-loops, repeated ordered pairs,
    /// out-of-range ids and probabilities outside `[0, 1]`.
    pub fn from_edges(n: usize, edges: &[Edge]) -> Result<Self> {
        let mut sorted: Vec<Edge> = edges.to_vec();
        for e in &sorted {
            if e.source >= n || e.target >= n {
                return Err(Error::data(alloc::format!(
                    "edge {} -> {} references a node outside 0..{n}",
                    e.source,
                    e.target
                )));
            }
            if e.source == e.target {
                return Err(Error::data(alloc::format!("self-loop on node {}", e.source)));
            }
            if !(0.0..=1.0).contains(&e.probability) {
                return Err(Error::data(alloc::format!(
                    "edge {} -> {} has probability {} outside [0, 1]",
                    e.source,
                    e.target,
                    e.probability
                )));
            }
        }
        sorted.sort_by_key(|e| (e.source, e.target));
        for w in sorted.windows(2) {
            if w[0].source == w[1].source && w[0].target == w[1].target {
                return Err(Error::data(alloc::format!("duplicate edge {} -> {}", w[0].source, w[0].target)));
            }
        }
        let mut offsets = vec![0usize; n + 1];
        for e in &sorted {
            offsets[e.source + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        Ok(SocialNetwork {
            n,
            offsets,
            sources: sorted.iter().map(|e| e.source).collect(),
            targets: sorted.iter().map(|e| e.target).collect(),
            probs: sorted.iter().map(|e| e.probability).collect(),
        })
    }

    /// Network with no edges.
    pub fn empty(n: usize) -> Self {
        SocialNetwork { n, offsets: vec![0; n + 1], sources: Vec::new(), targets: Vec::new(), probs: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len()
    }

    /// Edge indices leaving `u`.
    pub fn edge_range(&self, u: usize) -> Range<usize> {
        self.offsets[u]..self.offsets[u + 1]
    }

    pub fn out_degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    pub fn out_neighbors(&self, u: usize) -> &[usize] {
        &self.targets[self.edge_range(u)]
    }

    pub fn out_probabilities(&self, u: usize) -> &[f64] {
        &self.probs[self.edge_range(u)]
    }

    pub fn source(&self, e: usize) -> usize {
        self.sources[e]
    }

    pub fn target(&self, e: usize) -> usize {
        self.targets[e]
    }

    pub fn probability(&self, e: usize) -> f64 {
        self.probs[e]
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn edge(&self, e: usize) -> Edge {
        Edge { source: self.sources[e], target: self.targets[e], probability: self.probs[e] }
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        (0..self.edge_count()).map(move |e| self.edge(e))
    }

    /// Index of the edge `u -> v`, if present.
    pub fn find_edge(&self, u: usize, v: usize) -> Option<usize> {
        let r = self.edge_range(u);
        self.targets[r.clone()].binary_search(&v).ok().map(|i| r.start + i)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.find_edge(u, v).is_some()
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for &t in &self.targets {
            d[t] += 1;
        }
        d
    }

    pub fn mean_out_degree(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.edge_count() as f64 / self.n as f64
        }
    }

    /// Same topology with new probabilities, one per edge in index order.
    pub fn with_probabilities(&self, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != self.edge_count() {
            return Err(Error::data("probability vector length does not match the edge count"));
        }
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::data("edge probabilities must lie in [0, 1]"));
        }
        Ok(SocialNetwork { probs, ..self.clone() })
    }

    /// Number of unordered pairs joined in both directions.
    pub fn mutual_pair_count(&self) -> usize {
        self.edges().filter(|e| e.source < e.target && self.has_edge(e.target, e.source)).count()
    }
}

/// Incremental edge set used by the generators: self-loops and repeated
/// ordered pairs are silently dropped.
#[derive(Debug, Clone)]
pub struct NetworkBuilder {
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl NetworkBuilder {
    pub fn new(n: usize) -> Self {
        NetworkBuilder { adjacency: vec![Vec::new(); n] }
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].iter().any(|&(t, _)| t == v)
    }

    /// Add `u -> v`; returns whether the edge was new.
    pub fn add_edge(&mut self, u: usize, v: usize, probability: f64) -> bool {
        if u == v || self.has_edge(u, v) {
            return false;
        }
        self.adjacency[u].push((v, probability));
        true
    }

    pub fn add_mutual(&mut self, u: usize, v: usize, probability: f64) {
        self.add_edge(u, v, probability);
        self.add_edge(v, u, probability);
    }

    pub fn build(self) -> SocialNetwork {
        let n = self.adjacency.len();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut sources = Vec::new();
        let mut targets = Vec::new();
        let mut probs = Vec::new();
        offsets.push(0);
        for (u, mut out) in self.adjacency.into_iter().enumerate() {
            out.sort_by_key(|&(t, _)| t);
            for (t, p) in out {
                sources.push(u);
                targets.push(t);
                probs.push(p);
            }
            offsets.push(targets.len());
        }
        SocialNetwork { n, offsets, sources, targets, probs }
    }
}

/// Community label of every node; labels are dense `0..k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    labels: Vec<usize>,
    k: usize,
}

impl Partition {
    pub fn new(labels: Vec<usize>) -> Result<Self> {
        let k = labels.iter().map(|&l| l + 1).max().unwrap_or(0);
        let mut used = vec![false; k];
        for &l in &labels {
            used[l] = true;
        }
        if let Some(missing) = used.iter().position(|&u| !u) {
            return Err(Error::data(alloc::format!("community labels must be dense; label {missing} is unused")));
        }
        Ok(Partition { labels, k })
    }

    /// Single community holding all `n` nodes.
    pub fn single(n: usize) -> Self {
        Partition { labels: vec![0; n], k: usize::from(n > 0) }
    }

    /// Build from `(node, community)` pairs covering `0..n`. Community labels
    /// may be arbitrary integers; they are renumbered densely by first
    /// appearance in ascending label order.
    pub fn from_pairs(n: usize, pairs: &[(usize, u64)]) -> Result<Self> {
        let mut raw: Vec<Option<u64>> = vec![None; n];
        for &(node, label) in pairs {
            if node >= n {
                return Err(Error::data(alloc::format!("partition names node {node} outside 0..{n}")));
            }
            if raw[node].is_some_and(|l| l != label) {
                return Err(Error::data(alloc::format!("node {node} has two communities")));
            }
            raw[node] = Some(label);
        }
        let mut dense: BTreeMap<u64, usize> = BTreeMap::new();
        for l in raw.iter().flatten() {
            dense.entry(*l).or_insert(0);
        }
        for (i, v) in dense.values_mut().enumerate() {
            *v = i;
        }
        let mut labels = Vec::with_capacity(n);
        for (node, l) in raw.iter().enumerate() {
            match l {
                Some(l) => labels.push(dense[l]),
                None => {
                    return Err(Error::data(alloc::format!("node {node} has no community")));
                }
            }
        }
        Partition::new(labels)
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn n_communities(&self) -> usize {
        self.k
    }

    pub fn label(&self, v: usize) -> usize {
        self.labels[v]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.k];
        for &l in &self.labels {
            s[l] += 1;
        }
        s
    }

    /// Node ids of each community.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut m = vec![Vec::new(); self.k];
        for (v, &l) in self.labels.iter().enumerate() {
            m[l].push(v);
        }
        m
    }
}

/// Parameters of the spatial small-world generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialParams {
    pub radius: f64,
    pub weak_ties: usize,
    pub exponent: f64,
    /// Also add the reverse edge of every weak tie.
    pub reciprocal_weak_ties: bool,
}

impl Default for SpatialParams {
    fn default() -> Self {
        SpatialParams { radius: 0.13, weak_ties: 2, exponent: 2.0, reciprocal_weak_ties: false }
    }
}

/// A generated spatial network with its node coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialNetwork {
    pub network: SocialNetwork,
    pub coords: Vec<(f64, f64)>,
    pub side: f64,
}

/// Side of the square holding `n` nodes at density 20.
pub fn spatial_side(n: usize) -> f64 {
    libm::sqrt(n as f64 / 20.0)
}

/// Spatial small-world network: nodes uniform in a square of side
/// `sqrt(n / 20)`, mutual strong ties within `radius`, and `weak_ties`
/// long-range ties per node drawn with weight `distance^-exponent` among
/// nodes that are not strong ties. Weak ties are directed unless
/// `reciprocal_weak_ties` is set. All probabilities are 1 until assigned.
pub fn gen_watts_strogatz_spatial<R: Rng + ?Sized>(
    n: usize,
    params: SpatialParams,
    rng: &mut R,
) -> Result<SpatialNetwork> {
    if n < 2 {
        return Err(Error::config("the spatial generator needs at least two nodes"));
    }
    let side = spatial_side(n);
    let coords: Vec<(f64, f64)> = (0..n)
        .map(|_| {
            let x = rng.random::<f64>() * side;
            let y = rng.random::<f64>() * side;
            (x, y)
        })
        .collect();
    let network = spatial_from_coords(&coords, params, rng)?;
    Ok(SpatialNetwork { network, coords, side })
}

/// Tie construction of [`gen_watts_strogatz_spatial`] on given coordinates.
pub fn spatial_from_coords<R: Rng + ?Sized>(
    coords: &[(f64, f64)],
    params: SpatialParams,
    rng: &mut R,
) -> Result<SocialNetwork> {
    let n = coords.len();
    if n < 2 {
        return Err(Error::config("the spatial generator needs at least two nodes"));
    }
    if !(params.radius >= 0.0) || !(params.exponent >= 0.0) {
        return Err(Error::config("radius and exponent must be non-negative"));
    }
    let mut builder = NetworkBuilder::new(n);
    let strong = strong_ties(coords, params.radius);
    for (u, neighbors) in strong.iter().enumerate() {
        for &v in neighbors {
            builder.add_edge(u, v, 1.0);
        }
    }

    let mut weights = Vec::with_capacity(n);
    let mut candidates = Vec::with_capacity(n);
    let mut excluded = vec![false; n];
    for u in 0..n {
        if params.weak_ties == 0 {
            break;
        }
        for &v in &strong[u] {
            excluded[v] = true;
        }
        excluded[u] = true;
        weights.clear();
        candidates.clear();
        let mut total = 0.0;
        for v in 0..n {
            if excluded[v] {
                continue;
            }
            let d = distance(coords[u], coords[v]).max(1e-12);
            total += libm::pow(d, -params.exponent);
            candidates.push(v);
            weights.push(total);
        }
        for &v in &strong[u] {
            excluded[v] = false;
        }
        excluded[u] = false;
        if candidates.is_empty() || !(total > 0.0) || !total.is_finite() {
            continue;
        }
        for _ in 0..params.weak_ties {
            let r = rng.random::<f64>() * total;
            let i = weights.partition_point(|&c| c <= r).min(candidates.len() - 1);
            builder.add_edge(u, candidates[i], 1.0);
            if params.reciprocal_weak_ties {
                builder.add_edge(candidates[i], u, 1.0);
            }
        }
    }
    Ok(builder.build())
}

fn distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    let dx = a.0 - b.0;
    let dy = a.1 - b.1;
    libm::sqrt(dx * dx + dy * dy)
}

/// For each node, the other nodes within `radius`, found by grid bucketing.
fn strong_ties(coords: &[(f64, f64)], radius: f64) -> Vec<Vec<usize>> {
    let n = coords.len();
    let mut out = vec![Vec::new(); n];
    if radius <= 0.0 {
        return out;
    }
    let min_x = coords.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
    let min_y = coords.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    let cell = |c: (f64, f64)| -> (i64, i64) {
        (libm::floor((c.0 - min_x) / radius) as i64, libm::floor((c.1 - min_y) / radius) as i64)
    };
    let mut grid: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
    for (i, &c) in coords.iter().enumerate() {
        grid.entry(cell(c)).or_default().push(i);
    }
    for (u, &c) in coords.iter().enumerate() {
        let (cx, cy) = cell(c);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(bucket) = grid.get(&(cx + dx, cy + dy)) {
                    for &v in bucket {
                        if v != u && distance(c, coords[v]) <= radius {
                            out[u].push(v);
                        }
                    }
                }
            }
        }
        out[u].sort_unstable();
    }
    out
}

/// Sequential attachment: starting from a mutual pair, each new node links
/// mutually to one existing node chosen degree-proportionally with
/// probability `p_pref`, uniformly otherwise. Probabilities are 1 until assigned.
pub fn gen_preferential_attachment<R: Rng + ?Sized>(n: usize, p_pref: f64, rng: &mut R) -> Result<SocialNetwork> {
    if n < 2 {
        return Err(Error::config("preferential attachment needs at least two nodes"));
    }
    if !(0.0..=1.0).contains(&p_pref) {
        return Err(Error::config("p_pref must lie in [0, 1]"));
    }
    let mut builder = NetworkBuilder::new(n);
    // Every undirected edge contributes both endpoints, so a uniform pick
    // from this list is degree-proportional.
    let mut endpoints = Vec::with_capacity(2 * n);
    builder.add_mutual(0, 1, 1.0);
    endpoints.extend([0, 1]);
    for v in 2..n {
        let target = if rng.random::<f64>() < p_pref {
            endpoints[rng.random_range(0..endpoints.len())]
        } else {
            rng.random_range(0..v)
        };
        builder.add_mutual(v, target, 1.0);
        endpoints.extend([v, target]);
    }
    Ok(builder.build())
}

/// Closed probability interval for edge assignment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbabilityRange {
    pub lo: f64,
    pub hi: f64,
}

impl ProbabilityRange {
    pub const INTRA: ProbabilityRange = ProbabilityRange { lo: 0.6, hi: 1.0 };
    pub const INTER: ProbabilityRange = ProbabilityRange { lo: 0.0, hi: 0.4 };
    pub const UNIT: ProbabilityRange = ProbabilityRange { lo: 0.0, hi: 1.0 };

    fn validate(self) -> Result<()> {
        if !(0.0 <= self.lo && self.lo <= self.hi && self.hi <= 1.0) {
            return Err(Error::config("probability range must satisfy 0 <= lo <= hi <= 1"));
        }
        Ok(())
    }

    fn draw<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        self.lo + (self.hi - self.lo) * rng.random::<f64>()
    }
}

/// Redraw every edge probability, in edge order, from `intra` when both
/// endpoints share a community and from `inter` otherwise.
pub fn assign_edge_probabilities_by_community<R: Rng + ?Sized>(
    net: &SocialNetwork,
    partition: &Partition,
    intra: ProbabilityRange,
    inter: ProbabilityRange,
    rng: &mut R,
) -> Result<SocialNetwork> {
    intra.validate()?;
    inter.validate()?;
    if partition.n() != net.n() {
        return Err(Error::data(alloc::format!(
            "partition covers {} nodes but the network has {}",
            partition.n(),
            net.n()
        )));
    }
    let probs = net
        .edges()
        .map(|e| if partition.label(e.source) == partition.label(e.target) { intra.draw(rng) } else { inter.draw(rng) })
        .collect();
    net.with_probabilities(probs)
}

/// Redraw every edge probability uniformly from `[0, 1]`, in edge order.
pub fn assign_uniform_random_probabilities<R: Rng + ?Sized>(net: &SocialNetwork, rng: &mut R) -> SocialNetwork {
    let probs = (0..net.edge_count()).map(|_| ProbabilityRange::UNIT.draw(rng)).collect();
    net.with_probabilities(probs).expect("unit draws are valid probabilities")
}

/// Set every edge to the same probability.
pub fn with_constant_probability(net: &SocialNetwork, p: f64) -> Result<SocialNetwork> {
    net.with_probabilities(vec![p; net.edge_count()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::stream_rng;

    #[test]
    fn from_edges_validates() {
        let e = |s, t, p| Edge { source: s, target: t, probability: p };
        assert!(SocialNetwork::from_edges(2, &[e(0, 0, 0.5)]).is_err());
        assert!(SocialNetwork::from_edges(2, &[e(0, 1, 0.5), e(0, 1, 0.2)]).is_err());
        assert!(SocialNetwork::from_edges(2, &[e(0, 2, 0.5)]).is_err());
        assert!(SocialNetwork::from_edges(2, &[e(0, 1, 1.5)]).is_err());
        let net = SocialNetwork::from_edges(3, &[e(2, 0, 0.1), e(0, 2, 0.2), e(0, 1, 0.3)]).unwrap();
        assert_eq!(net.out_neighbors(0), &[1, 2]);
        assert_eq!(net.out_probabilities(0), &[0.3, 0.2]);
        assert_eq!(net.find_edge(2, 0), Some(2));
        assert!(!net.has_edge(1, 0));
    }

    #[test]
    fn spatial_side_for_twenty_nodes_is_one() {
        assert_eq!(spatial_side(20), 1.0);
        let mut rng = stream_rng(1, &[]);
        let g = gen_watts_strogatz_spatial(20, SpatialParams::default(), &mut rng).unwrap();
        assert_eq!(g.side, 1.0);
        assert!(g.coords.iter().all(|&(x, y)| (0.0..1.0).contains(&x) && (0.0..1.0).contains(&y)));
    }

    #[test]
    fn close_nodes_get_a_mutual_strong_tie() {
        let mut rng = stream_rng(2, &[]);
        let coords = [(0.0, 0.0), (0.1, 0.0), (3.0, 3.0)];
        let params = SpatialParams { weak_ties: 0, ..SpatialParams::default() };
        let net = spatial_from_coords(&coords, params, &mut rng).unwrap();
        assert!(net.has_edge(0, 1) && net.has_edge(1, 0));
        assert_eq!(net.edge_count(), 2);
    }

    #[test]
    fn strong_ties_match_brute_force() {
        let mut rng = stream_rng(3, &[]);
        let coords: Vec<(f64, f64)> =
            (0..300).map(|_| (rng.random::<f64>() * 3.0, rng.random::<f64>() * 3.0)).collect();
        let ties = strong_ties(&coords, 0.13);
        for u in 0..coords.len() {
            let brute: Vec<usize> =
                (0..coords.len()).filter(|&v| v != u && distance(coords[u], coords[v]) <= 0.13).collect();
            assert_eq!(ties[u], brute);
        }
    }

    #[test]
    fn spatial_generator_rejects_tiny_graphs() {
        let mut rng = stream_rng(4, &[]);
        assert!(matches!(gen_watts_strogatz_spatial(1, SpatialParams::default(), &mut rng), Err(Error::Config(_))));
    }

    #[test]
    fn two_node_attachment_is_one_mutual_edge() {
        let mut rng = stream_rng(5, &[]);
        let net = gen_preferential_attachment(2, 0.5, &mut rng).unwrap();
        assert_eq!(net.edge_count(), 2);
        assert!(net.has_edge(0, 1) && net.has_edge(1, 0));
    }

    #[test]
    fn attachment_is_a_tree() {
        let mut rng = stream_rng(6, &[]);
        let net = gen_preferential_attachment(200, 0.75, &mut rng).unwrap();
        assert_eq!(net.edge_count(), 2 * 199);
        assert_eq!(net.mutual_pair_count(), 199);
    }

    #[test]
    fn single_community_gets_intra_range() {
        let mut rng = stream_rng(7, &[]);
        let g = gen_watts_strogatz_spatial(100, SpatialParams::default(), &mut rng).unwrap();
        let net = assign_edge_probabilities_by_community(
            &g.network,
            &Partition::single(100),
            ProbabilityRange::INTRA,
            ProbabilityRange::INTER,
            &mut rng,
        )
        .unwrap();
        assert!(net.probabilities().iter().all(|p| (0.6..=1.0).contains(p)));
    }

    #[test]
    fn singleton_communities_get_inter_range() {
        let mut rng = stream_rng(8, &[]);
        let net = SocialNetwork::from_edges(2, &[Edge { source: 0, target: 1, probability: 1.0 }]).unwrap();
        let part = Partition::new(vec![0, 1]).unwrap();
        let out = assign_edge_probabilities_by_community(
            &net,
            &part,
            ProbabilityRange::INTRA,
            ProbabilityRange::INTER,
            &mut rng,
        )
        .unwrap();
        assert!((0.0..=0.4).contains(&out.probability(0)));
        assert!(assign_edge_probabilities_by_community(
            &net,
            &Partition::single(3),
            ProbabilityRange::INTRA,
            ProbabilityRange::INTER,
            &mut rng
        )
        .is_err());
    }

    #[test]
    fn partition_checks() {
        assert!(Partition::new(vec![0, 2]).is_err());
        let p = Partition::from_pairs(3, &[(0, 7), (1, 3), (2, 7)]).unwrap();
        assert_eq!(p.labels(), &[1, 0, 1]);
        assert_eq!(p.sizes(), vec![1, 2]);
        assert!(Partition::from_pairs(3, &[(0, 7), (1, 3)]).is_err());
        assert!(Partition::from_pairs(2, &[(0, 1), (1, 1), (0, 2)]).is_err());
    }
}
