//! Reproducible construction of electoral scenarios.
//!
//! Every random ingredient of a scenario draws from its own stream derived
//! from the master seed and the ingredient's coordinates, so a scenario
//! depends only on what it is, never on the order in which scenarios are
//! built or on which other scenarios exist.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use votecascade_core::graph::{
    assign_edge_probabilities_by_community, assign_uniform_random_probabilities, gen_preferential_attachment,
    gen_watts_strogatz_spatial, Partition, ProbabilityRange, SocialNetwork, SpatialParams,
};
use votecascade_core::model::{sample_views, Candidate, CandidateId, Electorate, NoiseSpec};
use votecascade_core::scenario::Scenario;
use votecascade_core::stream::{stream_rng, StreamRng};

use crate::error::{HarnessError, Result};

const PLACEMENT: u64 = 1;
const TARGET: u64 = 2;
const VIEWS: u64 = 3;
const GRAPH: u64 = 4;
const PROBABILITIES: u64 = 5;
const CAMPAIGN: u64 = 6;

/// Candidate positions of the community-structured case study.
pub const COMMUNITY_CANDIDATES: [f64; 5] = [-1.0, -0.5, 0.0, 0.5, 1.0];

/// How the candidate to promote is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetRule {
    /// Uniformly among all candidates, per placement.
    Random,
    /// The candidate with the largest true position.
    Rightmost,
    Fixed(CandidateId),
}

impl fmt::Display for TargetRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TargetRule::Random => f.write_str("random"),
            TargetRule::Rightmost => f.write_str("rightmost"),
            TargetRule::Fixed(c) => write!(f, "{c}"),
        }
    }
}

impl FromStr for TargetRule {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "random" => Ok(TargetRule::Random),
            "rightmost" => Ok(TargetRule::Rightmost),
            other => other.parse().map(TargetRule::Fixed).map_err(|_| {
                HarnessError::config(format!("target must be `random`, `rightmost` or a candidate id, not `{s}`"))
            }),
        }
    }
}

impl TargetRule {
    pub fn choose<R: Rng + ?Sized>(&self, candidate_positions: &[f64], rng: &mut R) -> Result<CandidateId> {
        let m = candidate_positions.len();
        match *self {
            TargetRule::Random => Ok(rng.random_range(0..m)),
            TargetRule::Rightmost => Ok((0..m)
                .max_by(|&a, &b| candidate_positions[a].total_cmp(&candidate_positions[b]).then(b.cmp(&a)))
                .expect("at least one candidate")),
            TargetRule::Fixed(c) if c < m => Ok(c),
            TargetRule::Fixed(c) => Err(HarnessError::config(format!("target {c} is not among {m} candidates"))),
        }
    }
}

/// Where the social network of a scenario comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphSource {
    /// Spatial small-world graphs with uniformly random edge probabilities.
    Spatial(SpatialParams),
    /// Preferential attachment with uniformly random edge probabilities.
    Attachment { p_pref: f64 },
    /// A fixed network with community-based probabilities and the
    /// community-driven voter placement.
    Community(Box<CommunityNetwork>),
}

/// A loaded network, its communities and the communities whose voters start
/// near the centre.
#[derive(Debug, Clone, PartialEq)]
pub struct CommunityNetwork {
    pub network: SocialNetwork,
    pub partition: Partition,
    pub central: Vec<bool>,
}

impl CommunityNetwork {
    /// Mark the `central_count` smallest communities (ties by label) as central.
    pub fn new(network: SocialNetwork, partition: Partition, central_count: usize) -> Result<Self> {
        if partition.n() != network.n() {
            return Err(HarnessError::config(format!(
                "partition covers {} nodes but the network has {}",
                partition.n(),
                network.n()
            )));
        }
        let sizes = partition.sizes();
        let mut order: Vec<usize> = (0..sizes.len()).collect();
        order.sort_by_key(|&c| (sizes[c], c));
        let mut central = vec![false; sizes.len()];
        for &c in order.iter().take(central_count) {
            central[c] = true;
        }
        Ok(CommunityNetwork { network, partition, central })
    }

    /// Central voters uniform in `[-0.25, 0.25]`, the others uniform in
    /// `[-1, -0.25] ∪ [0.25, 1]`.
    pub fn place_voters<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        (0..self.network.n())
            .map(|v| {
                if self.central[self.partition.label(v)] {
                    rng.random_range(-0.25..=0.25)
                } else {
                    let magnitude = rng.random_range(0.25..=1.0);
                    if rng.random::<bool>() {
                        magnitude
                    } else {
                        -magnitude
                    }
                }
            })
            .collect()
    }
}

/// Coordinates of one scenario in a replicated experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ScenarioIndex {
    pub placement: usize,
    pub graph: usize,
    pub probabilities: usize,
}

/// Everything needed to build scenarios of one shape.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub n_voters: usize,
    pub n_candidates: usize,
    pub noise: NoiseSpec,
    pub target: TargetRule,
    pub graph: GraphSource,
}

/// Stable 64-bit key of a noise specification, independent of grid order.
fn noise_key(noise: &NoiseSpec) -> u64 {
    noise.to_string().bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ u64::from(b)).wrapping_mul(0x100_0000_01b3))
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_voters < 2 {
            return Err(HarnessError::config("at least two voters are required"));
        }
        if self.n_candidates < 2 {
            return Err(HarnessError::config("at least two candidates are required"));
        }
        self.noise.validate()?;
        if let TargetRule::Fixed(c) = self.target {
            if c >= self.n_candidates {
                return Err(HarnessError::config(format!("target {c} is not among {} candidates", self.n_candidates)));
            }
        }
        if let GraphSource::Community(c) = &self.graph {
            if c.network.n() != self.n_voters {
                return Err(HarnessError::config(format!(
                    "the community network has {} nodes, not {} voters",
                    c.network.n(),
                    self.n_voters
                )));
            }
        }
        Ok(())
    }

    fn n(&self) -> u64 {
        self.n_voters as u64
    }

    /// Electorate of a placement: positions, target, then views.
    pub fn electorate(&self, master: u64, placement: usize) -> Result<Electorate> {
        let mut rng = stream_rng(master, &[PLACEMENT, self.n(), placement as u64]);
        let (candidates, voters): (Vec<f64>, Vec<f64>) = match &self.graph {
            GraphSource::Community(c) => (COMMUNITY_CANDIDATES.to_vec(), c.place_voters(&mut rng)),
            _ => {
                let candidates = (0..self.n_candidates).map(|_| rng.random_range(-1.0..=1.0)).collect();
                let voters = (0..self.n_voters).map(|_| rng.random_range(-1.0..=1.0)).collect();
                (candidates, voters)
            }
        };
        let target = self.target.choose(&candidates, &mut stream_rng(master, &[TARGET, self.n(), placement as u64]))?;
        let cands: Vec<Candidate> =
            candidates.iter().enumerate().map(|(id, &position)| Candidate { id, position }).collect();
        let mut views_rng = stream_rng(master, &[VIEWS, self.n(), placement as u64, noise_key(&self.noise)]);
        let views = sample_views(&cands, voters.len(), &self.noise, &mut views_rng)?;
        Ok(Electorate::from_positions(&candidates, &voters, Some(views), target)?)
    }

    /// Network of a (graph, probability set) pair.
    pub fn network(&self, master: u64, graph: usize, probabilities: usize) -> Result<SocialNetwork> {
        let mut prob_rng = stream_rng(master, &[PROBABILITIES, self.n(), graph as u64, probabilities as u64]);
        let structure = match &self.graph {
            GraphSource::Spatial(params) => {
                let mut rng = stream_rng(master, &[GRAPH, self.n(), graph as u64]);
                gen_watts_strogatz_spatial(self.n_voters, *params, &mut rng)?.network
            }
            GraphSource::Attachment { p_pref } => {
                let mut rng = stream_rng(master, &[GRAPH, self.n(), graph as u64]);
                gen_preferential_attachment(self.n_voters, *p_pref, &mut rng)?
            }
            GraphSource::Community(c) => {
                return Ok(assign_edge_probabilities_by_community(
                    &c.network,
                    &c.partition,
                    ProbabilityRange::INTRA,
                    ProbabilityRange::INTER,
                    &mut prob_rng,
                )?);
            }
        };
        Ok(assign_uniform_random_probabilities(&structure, &mut prob_rng))
    }

    pub fn scenario(&self, master: u64, index: ScenarioIndex, delta: f64) -> Result<Scenario> {
        let electorate = self.electorate(master, index.placement)?;
        let network = self.network(master, index.graph, index.probabilities)?;
        Ok(Scenario::new(electorate, network, delta)?)
    }

    /// Randomness consumed by the campaigns run on a scenario. Shared by all
    /// algorithms, budgets and steps so that they face the same cascades.
    pub fn campaign_rng(&self, master: u64, index: ScenarioIndex) -> StreamRng {
        stream_rng(
            master,
            &[CAMPAIGN, self.n(), index.placement as u64, index.graph as u64, index.probabilities as u64],
        )
    }
}
