//! Run counts for Monte Carlo estimates and the estimators themselves.

use alloc::vec::Vec;

use rand::Rng;

use crate::diffusion::IcSimulator;
use crate::graph::SocialNetwork;
use crate::num::{mean_std, CompensatedSum};
use crate::scenario::Scenario;
use crate::{Error, Result};

/// A run count together with the accuracy it buys.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleBudget {
    pub runs: u64,
    pub epsilon: f64,
    pub lambda: f64,
}

impl SampleBudget {
    /// Budget for estimating the weighted spread over `weighted_nodes` nodes.
    pub fn for_sigma(weighted_nodes: usize, epsilon: f64, lambda: f64) -> Result<Self> {
        Ok(SampleBudget { runs: sims_for_sigma(weighted_nodes, epsilon, lambda)?, epsilon, lambda })
    }

    /// Probability that the estimate misses by more than `epsilon`.
    pub fn failure_probability(&self) -> f64 {
        2.0 * self.lambda * self.lambda
    }
}

fn check_accuracy(epsilon: f64, lambda: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::config("epsilon must be positive"));
    }
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::config("lambda must lie in (0, 1)"));
    }
    Ok(())
}

/// `(range / epsilon)^2 * ln(1 / lambda)` before rounding up.
pub fn runs_for_range(range: f64, epsilon: f64, lambda: f64) -> Result<f64> {
    check_accuracy(epsilon, lambda)?;
    if !(range >= 0.0 && range.is_finite()) {
        return Err(Error::config("range must be non-negative"));
    }
    Ok(range * range / (epsilon * epsilon) * libm::log(1.0 / lambda))
}

fn ceil_runs(raw: f64) -> u64 {
    (libm::ceil(raw) as u64).max(1)
}

/// Runs needed to estimate the spread over `weighted_nodes` unit-weight nodes
/// within `epsilon` with probability at least `1 - 2 lambda^2`.
pub fn sims_for_sigma(weighted_nodes: usize, epsilon: f64, lambda: f64) -> Result<u64> {
    if weighted_nodes == 0 {
        return Err(Error::config("at least one weighted node is required"));
    }
    Ok(ceil_runs(runs_for_range(weighted_nodes as f64, epsilon, lambda)?))
}

/// Runs needed to estimate the expected change in margin within `epsilon`:
/// the change lies in `[0, n - |V_{c*}| + |V_{c_bar}|]`.
pub fn sims_for_dmov(
    n_voters: usize,
    votes_target: usize,
    votes_best_opponent: usize,
    epsilon: f64,
    lambda: f64,
) -> Result<u64> {
    if votes_target + votes_best_opponent > n_voters {
        return Err(Error::config("vote counts exceed the number of voters"));
    }
    let range = (n_voters - votes_target + votes_best_opponent) as f64;
    Ok(ceil_runs(runs_for_range(range, epsilon, lambda)?))
}

/// Mean number of activated unit-weight nodes over `runs` cascades from `seeds`.
pub fn estimate_sigma_w<R: Rng + ?Sized>(
    net: &SocialNetwork,
    weights: &[bool],
    seeds: &[usize],
    runs: u64,
    rng: &mut R,
) -> f64 {
    let mut sim = IcSimulator::new(net.n());
    estimate_sigma_w_with(&mut sim, net, weights, seeds, runs, rng)
}

/// [`estimate_sigma_w`] on a caller-owned simulator.
pub fn estimate_sigma_w_with<R: Rng + ?Sized>(
    sim: &mut IcSimulator,
    net: &SocialNetwork,
    weights: &[bool],
    seeds: &[usize],
    runs: u64,
    rng: &mut R,
) -> f64 {
    if seeds.is_empty() || runs == 0 {
        return 0.0;
    }
    let mut acc = CompensatedSum::new();
    for _ in 0..runs {
        let hits = sim.run(net, seeds, rng).iter().filter(|&&v| weights[v]).count();
        acc.add(hits as f64);
    }
    acc.total() / runs as f64
}

/// Sample mean and standard deviation of the change in margin over `runs`
/// independent cascades from `seeds`. The scenario is never modified.
pub fn estimate_dmov<R: Rng + ?Sized>(scenario: &Scenario, seeds: &[usize], runs: u64, rng: &mut R) -> (f64, f64) {
    if seeds.is_empty() || runs == 0 {
        return (0.0, 0.0);
    }
    let mut eval = scenario.dmov_evaluator();
    let mut sim = IcSimulator::new(scenario.n());
    let samples: Vec<f64> = (0..runs)
        .map(|_| {
            let activated = sim.run(&scenario.network, seeds, rng);
            eval.dmov(activated.iter().copied()) as f64
        })
        .collect();
    mean_std(&samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_run_counts() {
        let eps = 0.05 * libm::sqrt(2.0);
        assert_eq!(sims_for_sigma(1, eps, libm::sqrt(0.05)).unwrap(), 300);
        assert_eq!(sims_for_sigma(10, 0.1, 0.1).unwrap(), 23026);
        assert_eq!(sims_for_dmov(20, 0, 0, 1.0, 0.1).unwrap(), 922);
        assert_eq!(sims_for_dmov(1, 0, 0, eps, libm::sqrt(0.05)).unwrap(), 300);
    }

    #[test]
    fn tolerance_equal_to_range_leaves_log_term() {
        for lambda in [0.01, 0.1, 0.5, 0.9] {
            let expected = libm::ceil(libm::log(1.0 / lambda)).max(1.0) as u64;
            assert_eq!(sims_for_dmov(10, 3, 2, 9.0, lambda).unwrap(), expected);
        }
    }

    #[test]
    fn doubling_range_quadruples_raw_count() {
        for n in [1.0, 3.0, 17.0] {
            let a = runs_for_range(n, 0.07, 0.2).unwrap();
            let b = runs_for_range(2.0 * n, 0.07, 0.2).unwrap();
            assert_eq!(b, 4.0 * a);
        }
    }

    #[test]
    fn domain_errors() {
        assert!(sims_for_sigma(0, 0.1, 0.1).is_err());
        assert!(sims_for_sigma(1, 0.0, 0.1).is_err());
        assert!(sims_for_sigma(1, 0.1, 1.0).is_err());
        assert!(sims_for_sigma(1, 0.1, 0.0).is_err());
        assert!(sims_for_dmov(5, 3, 3, 0.1, 0.1).is_err());
    }
}
