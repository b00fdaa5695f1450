//! Multi-round manipulation campaigns.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::{Rng, SeedableRng};

use crate::diffusion::IcSimulator;
use crate::greedy::{greedy_apx, DEFAULT_SPREAD_RUNS};
use crate::heuristics::{Heuristic, PageRankOptions};
use crate::model::{max_delta_mov, CandidateId, Tally};
use crate::scenario::Scenario;
use crate::stream::StreamRng;
use crate::{Error, Result};

/// Name of the greedy approximation in configs and on the command line.
pub const GREEDY_APX: &str = "greedy-apx";

/// Seed-selection algorithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Algorithm {
    Heuristic(Heuristic),
    /// Hill-climbing with `runs` cascades per spread estimate.
    GreedyApx {
        runs: u64,
        lazy: bool,
    },
}

impl Algorithm {
    pub fn greedy() -> Self {
        Algorithm::GreedyApx { runs: DEFAULT_SPREAD_RUNS, lazy: false }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Heuristic(h) => h.name,
            Algorithm::GreedyApx { .. } => GREEDY_APX,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == GREEDY_APX {
            Ok(Algorithm::greedy())
        } else {
            Ok(Algorithm::Heuristic(Heuristic::by_name(s)?))
        }
    }
}

/// Wall-clock source for timing seed selection.
pub trait Clock {
    /// Seconds since an arbitrary fixed origin.
    fn seconds(&self) -> f64;
}

/// Clock that never advances; all timings read zero.
#[derive(Debug, Clone, Copy, Default)]
pub struct NullClock;

impl Clock for NullClock {
    fn seconds(&self) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignConfig {
    pub algorithm: Algorithm,
    /// Seeds per round as a fraction of the voters.
    pub budget_fraction: f64,
    pub rounds: usize,
    pub stop_at_unanimity: bool,
    pub pagerank: PageRankOptions,
}

impl CampaignConfig {
    pub fn new(algorithm: Algorithm, budget_fraction: f64) -> Self {
        CampaignConfig {
            algorithm,
            budget_fraction,
            rounds: 10,
            stop_at_unanimity: true,
            pagerank: PageRankOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.budget_fraction > 0.0 && self.budget_fraction <= 1.0) {
            return Err(Error::config("budget fraction must lie in (0, 1]"));
        }
        if self.rounds == 0 {
            return Err(Error::config("a campaign needs at least one round"));
        }
        self.pagerank.validate()
    }

    /// Seeds per round for `n` voters: the floored fraction, at least one.
    pub fn budget(&self, n: usize) -> usize {
        budget_for(self.budget_fraction, n)
    }
}

/// `max(1, floor(fraction * n))`, tolerant of representation error in the fraction.
pub fn budget_for(fraction: f64, n: usize) -> usize {
    (libm::floor(fraction * n as f64 + 1e-9) as usize).max(1)
}

/// Seeds chosen by `algorithm` on the current state of `scenario`.
pub fn select_seeds<R: Rng + ?Sized>(
    algorithm: &Algorithm,
    scenario: &Scenario,
    budget: usize,
    pagerank: PageRankOptions,
    rng: &mut R,
) -> Result<Vec<usize>> {
    match algorithm {
        Algorithm::Heuristic(h) => h.select(scenario, budget, pagerank),
        Algorithm::GreedyApx { runs, lazy } => Ok(greedy_apx(scenario, budget, *runs, *lazy, rng)),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundReport {
    /// 1-based.
    pub round: usize,
    pub seeds: Vec<usize>,
    /// Voters reached by the cascade, seeds included.
    pub activated: usize,
    pub tally: Tally,
    pub mov: i64,
    /// Margin after this round minus the margin before the campaign.
    pub cumulative_dmov: i64,
    /// `cumulative_dmov` over its largest attainable value at the start.
    pub normalized_dmov: f64,
    pub selection_seconds: f64,
}

/// An evolving campaign: the scenario's electorate moves every round.
#[derive(Debug, Clone)]
pub struct CampaignState {
    pub scenario: Scenario,
    pub round: usize,
    initial_mov: i64,
    normalizer: usize,
    sim: IcSimulator,
}

impl CampaignState {
    pub fn new(scenario: Scenario) -> Self {
        let tally = scenario.electorate.tally();
        let target = scenario.target();
        let sim = IcSimulator::new(scenario.n());
        CampaignState {
            initial_mov: tally.margin_of_victory(target),
            normalizer: max_delta_mov(&tally, target),
            scenario,
            round: 0,
            sim,
        }
    }

    pub fn initial_mov(&self) -> i64 {
        self.initial_mov
    }

    /// Largest change in margin attainable from the initial state.
    pub fn normalizer(&self) -> usize {
        self.normalizer
    }

    pub fn target(&self) -> CandidateId {
        self.scenario.target()
    }

    pub fn is_unanimous(&self) -> bool {
        self.scenario.electorate.tally().get(self.target()) == self.scenario.n()
    }
}

/// Change in margin divided by its largest attainable value; 0 when nothing
/// can be gained.
pub fn normalized(dmov: i64, normalizer: usize) -> f64 {
    if normalizer == 0 {
        0.0
    } else {
        dmov as f64 / normalizer as f64
    }
}

/// Select seeds, run one cascade, move every activated voter, retally.
pub fn run_round<R, C>(
    state: &mut CampaignState,
    config: &CampaignConfig,
    selection_rng: &mut R,
    diffusion_rng: &mut R,
    clock: &C,
) -> Result<RoundReport>
where
    R: Rng + ?Sized,
    C: Clock + ?Sized,
{
    let budget = config.budget(state.scenario.n());
    let start = clock.seconds();
    let seeds = select_seeds(&config.algorithm, &state.scenario, budget, config.pagerank, selection_rng)?;
    let selection_seconds = clock.seconds() - start;

    let activated = state.sim.run(&state.scenario.network, &seeds, diffusion_rng).to_vec();
    let delta = state.scenario.delta;
    state.scenario.electorate.apply_influence(&activated, delta);
    state.round += 1;

    let tally = state.scenario.electorate.tally();
    let mov = tally.margin_of_victory(state.target());
    let cumulative_dmov = mov - state.initial_mov;
    Ok(RoundReport {
        round: state.round,
        seeds,
        activated: activated.len(),
        tally,
        mov,
        cumulative_dmov,
        normalized_dmov: normalized(cumulative_dmov, state.normalizer),
        selection_seconds,
    })
}

/// Up to `config.rounds` rounds; stops after a round that leaves every voter
/// supporting the target when `stop_at_unanimity` is set. Seed selection and
/// diffusion draw from separate streams split off `rng`, so algorithms
/// compared under the same `rng` face the same diffusion randomness.
pub fn run_campaign<R, C>(
    scenario: &Scenario,
    config: &CampaignConfig,
    rng: &mut R,
    clock: &C,
) -> Result<Vec<RoundReport>>
where
    R: Rng + ?Sized,
    C: Clock + ?Sized,
{
    config.validate()?;
    let mut selection = StreamRng::seed_from_u64(rng.random());
    let mut diffusion = StreamRng::seed_from_u64(rng.random());
    let mut state = CampaignState::new(scenario.clone());
    let mut reports = Vec::with_capacity(config.rounds);
    for _ in 0..config.rounds {
        let report = run_round(&mut state, config, &mut selection, &mut diffusion, clock)?;
        reports.push(report);
        if config.stop_at_unanimity && state.is_unanimous() {
            break;
        }
    }
    Ok(reports)
}

/// One-line human summary of a report.
pub fn describe_round(report: &RoundReport) -> String {
    alloc::format!(
        "round {:>2}: seeds {:?} activated {} tally {:?} mov {} dmov {} normalized {:.3}",
        report.round,
        report.seeds,
        report.activated,
        report.tally.votes(),
        report.mov,
        report.cumulative_dmov,
        report.normalized_dmov
    )
}
