//! Experiment grids: configuration, scenario enumeration and replicated
//! campaigns aggregated into a result table.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use votecascade_core::campaign::{run_campaign, Algorithm, CampaignConfig, Clock};
use votecascade_core::graph::SpatialParams;
use votecascade_core::heuristics::{PageRankOptions, CATALOG};
use votecascade_core::model::NoiseSpec;

use crate::error::{HarnessError, Result};
use crate::formats::{load_edge_list, load_partition, read_file};
use crate::results::{CellKey, ResultRow, ResultTable};
use crate::scenarios::{CommunityNetwork, GraphSource, ScenarioIndex, ScenarioSpec, TargetRule};
use crate::stats::Summary;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphFamily {
    WattsStrogatz,
    PreferentialAttachment,
    /// A network loaded from `edges`, with communities from `partition`.
    Community,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GraphConfig {
    pub family: GraphFamily,
    /// Strong-tie radius of spatial graphs.
    pub radius: f64,
    /// Weak ties per node of spatial graphs.
    pub weak_ties: usize,
    /// Power-law exponent of weak-tie distances.
    pub exponent: f64,
    /// Make every weak tie two-way.
    pub reciprocal_weak_ties: bool,
    /// Probability of linking preferentially in attachment graphs.
    pub p_pref: f64,
    pub edges: Option<PathBuf>,
    pub partition: Option<PathBuf>,
    /// Number of smallest communities whose voters start near the centre.
    pub central_communities: usize,
}

impl Default for GraphConfig {
    fn default() -> Self {
        let spatial = SpatialParams::default();
        GraphConfig {
            family: GraphFamily::WattsStrogatz,
            radius: spatial.radius,
            weak_ties: spatial.weak_ties,
            exponent: spatial.exponent,
            reciprocal_weak_ties: spatial.reciprocal_weak_ties,
            p_pref: 0.25,
            edges: None,
            partition: None,
            central_communities: 7,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Replications {
    pub placements: usize,
    pub graphs: usize,
    pub probability_sets: usize,
}

impl Default for Replications {
    fn default() -> Self {
        Replications { placements: 8, graphs: 10, probability_sets: 10 }
    }
}

impl Replications {
    pub fn total(&self) -> usize {
        self.placements * self.graphs * self.probability_sets
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PageRankConfig {
    pub damping: f64,
    pub tolerance: f64,
    pub max_iters: usize,
    pub weight_by_probability: bool,
}

impl Default for PageRankConfig {
    fn default() -> Self {
        let d = PageRankOptions::default();
        PageRankConfig {
            damping: d.damping,
            tolerance: d.tolerance,
            max_iters: d.max_iters,
            weight_by_probability: d.weight_by_probability,
        }
    }
}

impl From<PageRankConfig> for PageRankOptions {
    fn from(c: PageRankConfig) -> Self {
        PageRankOptions {
            damping: c.damping,
            tolerance: c.tolerance,
            max_iters: c.max_iters,
            weight_by_probability: c.weight_by_probability,
        }
    }
}

/// An experiment as written in a TOML file. Every key is optional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentGrid {
    /// Master seed; the command line's `--seed` takes precedence.
    pub seed: Option<u64>,
    pub voters: Vec<usize>,
    pub candidates: usize,
    pub budget_fractions: Vec<f64>,
    pub deltas: Vec<f64>,
    /// Noise specifications such as `zero`, `uniform(-0.2,0.2)` or `gaussian(0,0.08)`.
    pub noises: Vec<String>,
    /// Catalog heuristic names or `greedy-apx`.
    pub algorithms: Vec<String>,
    /// `random`, `rightmost` or a candidate id.
    pub target: String,
    pub rounds: usize,
    pub stop_at_unanimity: bool,
    /// Cascades per spread estimate in the greedy approximation.
    pub greedy_runs: u64,
    pub lazy_greedy: bool,
    pub graph: GraphConfig,
    pub replications: Replications,
    pub pagerank: PageRankConfig,
}

impl Default for ExperimentGrid {
    fn default() -> Self {
        ExperimentGrid {
            seed: None,
            voters: vec![20, 50, 100],
            candidates: 5,
            budget_fractions: vec![0.05, 0.10, 0.15],
            deltas: vec![0.1, 0.2, 0.3, 0.4],
            noises: vec!["zero".into()],
            algorithms: CATALOG.iter().map(|h| h.name.to_string()).collect(),
            target: "random".into(),
            rounds: 10,
            stop_at_unanimity: true,
            greedy_runs: votecascade_core::greedy::DEFAULT_SPREAD_RUNS,
            lazy_greedy: false,
            graph: GraphConfig::default(),
            replications: Replications::default(),
            pagerank: PageRankConfig::default(),
        }
    }
}

impl ExperimentGrid {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| HarnessError::config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("grids always serialize")
    }

    /// Read a grid file; relative file paths inside it are taken relative to
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let mut grid =
            Self::from_toml(&read_file(path)?).map_err(|e| HarnessError::config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut grid.graph.edges, &mut grid.graph.partition].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(grid)
    }

    /// Number of scenarios per (voters, noise) pair.
    pub fn scenario_count(&self) -> usize {
        self.replications.total()
    }

    /// Check every parameter and load any network files.
    pub fn plan(&self) -> Result<GridPlan> {
        let seed = self.seed.ok_or_else(|| HarnessError::config("a master seed is required"))?;
        for (name, empty) in [
            ("voters", self.voters.is_empty()),
            ("budget_fractions", self.budget_fractions.is_empty()),
            ("deltas", self.deltas.is_empty()),
            ("noises", self.noises.is_empty()),
            ("algorithms", self.algorithms.is_empty()),
        ] {
            if empty {
                return Err(HarnessError::config(format!("`{name}` must not be empty")));
            }
        }
        if self.rounds == 0 {
            return Err(HarnessError::config("`rounds` must be at least 1"));
        }
        if self.replications.total() == 0 {
            return Err(HarnessError::config("every replication count must be at least 1"));
        }
        if self.greedy_runs == 0 {
            return Err(HarnessError::config("`greedy_runs` must be at least 1"));
        }
        for &d in &self.deltas {
            if !(d > 0.0 && d <= 2.0) {
                return Err(HarnessError::config(format!("delta {d} outside (0, 2]")));
            }
        }
        for &f in &self.budget_fractions {
            if !(f > 0.0 && f <= 1.0) {
                return Err(HarnessError::config(format!("budget fraction {f} outside (0, 1]")));
            }
            for &n in &self.voters {
                if (f * n as f64 + 1e-9).floor() < 1.0 {
                    return Err(HarnessError::config(format!(
                        "budget fraction {f} of {n} voters rounds down to no seeds"
                    )));
                }
            }
        }
        let pagerank: PageRankOptions = self.pagerank.into();
        pagerank.validate()?;
        let noises = self
            .noises
            .iter()
            .map(|s| s.parse::<NoiseSpec>().map_err(HarnessError::from))
            .collect::<Result<Vec<_>>>()?;
        let algorithms = self
            .algorithms
            .iter()
            .map(|s| {
                Ok(match s.parse::<Algorithm>()? {
                    Algorithm::GreedyApx { .. } => {
                        Algorithm::GreedyApx { runs: self.greedy_runs, lazy: self.lazy_greedy }
                    }
                    a => a,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let target: TargetRule = self.target.parse()?;
        let graph = self.graph_source()?;

        let mut specs = Vec::new();
        for &n in &self.voters {
            for noise in &noises {
                let spec = ScenarioSpec {
                    n_voters: n,
                    n_candidates: self.candidates,
                    noise: noise.clone(),
                    target,
                    graph: graph.clone(),
                };
                spec.validate()?;
                specs.push(spec);
            }
        }
        Ok(GridPlan {
            seed,
            specs,
            voters: self.voters.clone(),
            noises,
            budget_fractions: self.budget_fractions.clone(),
            deltas: self.deltas.clone(),
            algorithms,
            rounds: self.rounds,
            stop_at_unanimity: self.stop_at_unanimity,
            replications: self.replications,
            pagerank,
        })
    }

    fn graph_source(&self) -> Result<GraphSource> {
        let g = &self.graph;
        match g.family {
            GraphFamily::WattsStrogatz => {
                if !(g.radius > 0.0) || !(g.exponent >= 0.0) {
                    return Err(HarnessError::config(
                        "spatial graphs need a positive radius and non-negative exponent",
                    ));
                }
                Ok(GraphSource::Spatial(SpatialParams {
                    radius: g.radius,
                    weak_ties: g.weak_ties,
                    exponent: g.exponent,
                    reciprocal_weak_ties: g.reciprocal_weak_ties,
                }))
            }
            GraphFamily::PreferentialAttachment => {
                if !(0.0..=1.0).contains(&g.p_pref) {
                    return Err(HarnessError::config("`p_pref` must lie in [0, 1]"));
                }
                Ok(GraphSource::Attachment { p_pref: g.p_pref })
            }
            GraphFamily::Community => {
                let (Some(edges), Some(partition)) = (&g.edges, &g.partition) else {
                    return Err(HarnessError::config("the community family needs `edges` and `partition` files"));
                };
                if self.replications.graphs != 1 {
                    return Err(HarnessError::config("a loaded network allows exactly one graph replication"));
                }
                if self.candidates != 5 {
                    return Err(HarnessError::config("the community protocol places exactly 5 candidates"));
                }
                let network = load_edge_list(edges)?;
                let partition = load_partition(partition, network.n())?;
                Ok(GraphSource::Community(Box::new(CommunityNetwork::new(network, partition, g.central_communities)?)))
            }
        }
    }
}

/// A validated grid, ready to run.
#[derive(Debug, Clone)]
pub struct GridPlan {
    pub seed: u64,
    /// One per (voters, noise) pair, voters-major.
    pub specs: Vec<ScenarioSpec>,
    pub voters: Vec<usize>,
    pub noises: Vec<NoiseSpec>,
    pub budget_fractions: Vec<f64>,
    pub deltas: Vec<f64>,
    pub algorithms: Vec<Algorithm>,
    pub rounds: usize,
    pub stop_at_unanimity: bool,
    pub replications: Replications,
    pub pagerank: PageRankOptions,
}

/// Raw per-scenario values behind one result row.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CellSamples {
    /// Normalized change in margin, one per scenario; a campaign that stopped
    /// early contributes its final value to the remaining rounds.
    pub normalized_dmov: Vec<f64>,
    /// Seed-selection seconds, one per round actually played.
    pub seconds: Vec<f64>,
}

struct Job {
    spec: usize,
    index: ScenarioIndex,
}

impl GridPlan {
    fn jobs(&self) -> Vec<Job> {
        let r = self.replications;
        let mut jobs = Vec::with_capacity(self.specs.len() * r.total());
        for spec in 0..self.specs.len() {
            for placement in 0..r.placements {
                for graph in 0..r.graphs {
                    for probabilities in 0..r.probability_sets {
                        jobs.push(Job { spec, index: ScenarioIndex { placement, graph, probabilities } });
                    }
                }
            }
        }
        jobs
    }

    /// Cells of one spec, in output order: algorithm, budget, delta, round.
    fn cells_per_spec(&self) -> usize {
        self.algorithms.len() * self.budget_fractions.len() * self.deltas.len() * self.rounds
    }

    fn cell_offset(&self, alg: usize, budget: usize, delta: usize) -> usize {
        ((alg * self.budget_fractions.len() + budget) * self.deltas.len() + delta) * self.rounds
    }

    /// Every campaign of one scenario, as (cell within the spec, value, seconds).
    fn run_job<C: Clock + ?Sized>(&self, job: &Job, clock: &C) -> Result<Vec<(usize, f64, Option<f64>)>> {
        let spec = &self.specs[job.spec];
        let electorate = spec.electorate(self.seed, job.index.placement)?;
        let network = spec.network(self.seed, job.index.graph, job.index.probabilities)?;
        let mut out = Vec::with_capacity(self.cells_per_spec());
        for (d, &delta) in self.deltas.iter().enumerate() {
            let scenario = votecascade_core::scenario::Scenario::new(electorate.clone(), network.clone(), delta)?;
            for (b, &fraction) in self.budget_fractions.iter().enumerate() {
                for (a, algorithm) in self.algorithms.iter().enumerate() {
                    let config = CampaignConfig {
                        algorithm: *algorithm,
                        budget_fraction: fraction,
                        rounds: self.rounds,
                        stop_at_unanimity: self.stop_at_unanimity,
                        pagerank: self.pagerank,
                    };
                    let mut rng = spec.campaign_rng(self.seed, job.index);
                    let reports = run_campaign(&scenario, &config, &mut rng, clock)?;
                    let offset = self.cell_offset(a, b, d);
                    let mut last = 0.0;
                    for round in 0..self.rounds {
                        let (value, seconds) = match reports.get(round) {
                            Some(r) => (r.normalized_dmov, Some(r.selection_seconds)),
                            None => (last, None),
                        };
                        last = value;
                        out.push((offset + round, value, seconds));
                    }
                }
            }
        }
        Ok(out)
    }

    fn key(&self, spec: usize, cell: usize) -> CellKey {
        let n_noises = self.noises.len();
        let round = cell % self.rounds;
        let rest = cell / self.rounds;
        let d = rest % self.deltas.len();
        let rest = rest / self.deltas.len();
        let b = rest % self.budget_fractions.len();
        let a = rest / self.budget_fractions.len();
        CellKey {
            algorithm: self.algorithms[a].name().to_string(),
            n_voters: self.voters[spec / n_noises],
            budget_fraction: self.budget_fractions[b],
            delta: self.deltas[d],
            noise: self.noises[spec % n_noises].to_string(),
            round: round + 1,
        }
    }

    /// Run every campaign on a pool of `threads` workers (all cores when
    /// `None`) and keep the per-cell samples.
    pub fn run_with_samples<C: Clock + Sync + ?Sized>(
        &self,
        clock: &C,
        threads: Option<usize>,
    ) -> Result<(ResultTable, Vec<CellSamples>)> {
        let jobs = self.jobs();
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(t) = threads {
            builder = builder.num_threads(t);
        }
        let pool = builder.build().map_err(|e| HarnessError::config(e.to_string()))?;
        let results: Vec<Vec<(usize, f64, Option<f64>)>> =
            pool.install(|| jobs.par_iter().map(|job| self.run_job(job, clock)).collect::<Result<_>>())?;

        let per_spec = self.cells_per_spec();
        let mut samples = vec![CellSamples::default(); self.specs.len() * per_spec];
        for (job, values) in jobs.iter().zip(results) {
            for (cell, value, seconds) in values {
                let s = &mut samples[job.spec * per_spec + cell];
                s.normalized_dmov.push(value);
                s.seconds.extend(seconds);
            }
        }
        let rows = samples
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let dmov = Summary::of(&s.normalized_dmov);
                let time = Summary::of(&s.seconds);
                ResultRow {
                    key: self.key(i / per_spec, i % per_spec),
                    mean: dmov.mean,
                    std: dmov.std,
                    time_mean_s: time.mean,
                    time_std_s: time.std,
                }
            })
            .collect();
        Ok((ResultTable { rows }, samples))
    }

    pub fn run<C: Clock + Sync + ?Sized>(&self, clock: &C, threads: Option<usize>) -> Result<ResultTable> {
        Ok(self.run_with_samples(clock, threads)?.0)
    }
}

/// Validate `grid` and run it.
pub fn run_grid<C: Clock + Sync + ?Sized>(
    grid: &ExperimentGrid,
    clock: &C,
    threads: Option<usize>,
) -> Result<ResultTable> {
    grid.plan()?.run(clock, threads)
}
