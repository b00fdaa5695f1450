//! Wall-clock measurement of seed selection.
//!
//! Only the seed-selection call is timed. Building scenarios and simulating
//! the cascades that follow are shared by every algorithm and excluded.

use std::time::Instant;

use votecascade_core::campaign::{budget_for, select_seeds, Algorithm, Clock};
use votecascade_core::graph::SpatialParams;
use votecascade_core::heuristics::PageRankOptions;
use votecascade_core::model::NoiseSpec;
use votecascade_core::scenario::Scenario;
use votecascade_core::stream::stream_rng;

use crate::error::{HarnessError, Result};
use crate::scenarios::{GraphSource, ScenarioIndex, ScenarioSpec, TargetRule};
use crate::stats::{power_law_exponent, Summary};

/// Monotonic clock measuring seconds since its creation.
#[derive(Debug, Clone, Copy)]
pub struct WallClock {
    origin: Instant,
}

impl WallClock {
    pub fn new() -> Self {
        WallClock { origin: Instant::now() }
    }
}

impl Default for WallClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for WallClock {
    fn seconds(&self) -> f64 {
        self.origin.elapsed().as_secs_f64()
    }
}

/// Seconds taken by one seed-selection call on `scenario`.
pub fn time_selection<C: Clock + ?Sized>(
    algorithm: &Algorithm,
    scenario: &Scenario,
    budget: usize,
    pagerank: PageRankOptions,
    seed: u64,
    clock: &C,
) -> Result<f64> {
    let mut rng = stream_rng(seed, &[]);
    let start = clock.seconds();
    let seeds = select_seeds(algorithm, scenario, budget, pagerank, &mut rng)?;
    let elapsed = clock.seconds() - start;
    std::hint::black_box(seeds);
    Ok(elapsed)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmTiming {
    pub algorithm: String,
    pub seconds: Summary,
}

/// Per-algorithm seconds per seed-selection call over `scenarios`. Calls
/// are interleaved across algorithms so that drift in machine load affects
/// all of them alike.
pub fn timing_comparison<C: Clock + ?Sized>(
    scenarios: &[Scenario],
    algorithms: &[Algorithm],
    budget_fraction: f64,
    pagerank: PageRankOptions,
    seed: u64,
    clock: &C,
) -> Result<Vec<AlgorithmTiming>> {
    if algorithms.len() < 2 {
        return Err(HarnessError::config("a timing comparison needs at least two algorithms"));
    }
    if scenarios.is_empty() {
        return Err(HarnessError::config("a timing comparison needs at least one scenario"));
    }
    let mut samples = vec![Vec::with_capacity(scenarios.len()); algorithms.len()];
    for (s, scenario) in scenarios.iter().enumerate() {
        let budget = budget_for(budget_fraction, scenario.n());
        for (a, algorithm) in algorithms.iter().enumerate() {
            let run_seed = stream_seed(seed, s, a);
            samples[a].push(time_selection(algorithm, scenario, budget, pagerank, run_seed, clock)?);
        }
    }
    Ok(algorithms
        .iter()
        .zip(samples)
        .map(|(a, s)| AlgorithmTiming { algorithm: a.name().to_string(), seconds: Summary::of(&s) })
        .collect())
}

fn stream_seed(seed: u64, scenario: usize, algorithm: usize) -> u64 {
    votecascade_core::stream::derive_seed(seed, &[scenario as u64, algorithm as u64])
}

/// Electorate sizes of the default scalability sweep.
pub const SWEEP_SIZES: [usize; 7] = [200, 500, 1000, 2000, 5000, 10000, 20000];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub n_voters: usize,
    /// Median over repetitions.
    pub median_seconds: f64,
    pub seconds: Summary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub algorithm: String,
    pub points: Vec<SweepPoint>,
    /// Slope of log(time) against log(n).
    pub exponent: f64,
}

/// The `index`-th zero-noise spatial scenario used for timing at size `n`.
pub fn timing_scenario(n: usize, index: usize, delta: f64, seed: u64) -> Result<Scenario> {
    let spec = ScenarioSpec {
        n_voters: n,
        n_candidates: 5,
        noise: NoiseSpec::Zero,
        target: TargetRule::Random,
        graph: GraphSource::Spatial(SpatialParams::default()),
    };
    spec.validate()?;
    spec.scenario(seed, ScenarioIndex { placement: index, graph: index, probabilities: index }, delta)
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let k = values.len();
    if k % 2 == 1 {
        values[k / 2]
    } else {
        0.5 * (values[k / 2 - 1] + values[k / 2])
    }
}

/// Seed-selection time of `algorithm` against electorate size, with the
/// fitted power-law exponent.
pub fn scalability_sweep<C: Clock + ?Sized>(
    sizes: &[usize],
    algorithm: &Algorithm,
    budget_fraction: f64,
    repetitions: usize,
    seed: u64,
    clock: &C,
) -> Result<Sweep> {
    if sizes.len() < 2 {
        return Err(HarnessError::config("a sweep needs at least two sizes"));
    }
    if repetitions == 0 {
        return Err(HarnessError::config("a sweep needs at least one repetition"));
    }
    let pagerank = PageRankOptions::default();
    let mut points = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let scenario = timing_scenario(n, 0, 0.3, seed)?;
        let budget = budget_for(budget_fraction, n);
        // One untimed call warms caches and the allocator.
        time_selection(algorithm, &scenario, budget, pagerank, seed, clock)?;
        let mut times = (0..repetitions)
            .map(|r| time_selection(algorithm, &scenario, budget, pagerank, stream_seed(seed, n, r), clock))
            .collect::<Result<Vec<f64>>>()?;
        let seconds = Summary::of(&times);
        points.push(SweepPoint { n_voters: n, median_seconds: median(&mut times), seconds });
    }
    let x: Vec<f64> = points.iter().map(|p| p.n_voters as f64).collect();
    let y: Vec<f64> = points.iter().map(|p| p.median_seconds.max(1e-12)).collect();
    Ok(Sweep { algorithm: algorithm.name().to_string(), exponent: power_law_exponent(&x, &y), points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use votecascade_core::campaign::NullClock;

    #[test]
    fn comparison_needs_two_algorithms() {
        let s = timing_scenario(20, 0, 0.3, 1).unwrap();
        let a: Algorithm = "SPoutdeg".parse().unwrap();
        assert!(
            timing_comparison(std::slice::from_ref(&s), &[a], 0.1, PageRankOptions::default(), 0, &NullClock).is_err()
        );
        let r = timing_comparison(&[s], &[a, a], 0.1, PageRankOptions::default(), 0, &NullClock).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r[0].seconds, Summary { count: 1, mean: 0.0, std: 0.0 });
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 3.0, 2.0]), 2.5);
    }

    #[test]
    fn wall_clock_advances() {
        let c = WallClock::new();
        let a = c.seconds();
        std::thread::sleep(std::time::Duration::from_millis(2));
        assert!(c.seconds() - a >= 0.001);
    }
}
