//! How far noisy views push preferences from single-peakedness.

use rayon::prelude::*;
use votecascade_core::graph::SpatialParams;
use votecascade_core::model::NoiseSpec;

use crate::error::{HarnessError, Result};
use crate::scenarios::{GraphSource, ScenarioSpec, TargetRule};
use crate::stats::Summary;

#[derive(Debug, Clone, PartialEq)]
pub struct SwapDistanceStudy {
    pub noises: Vec<NoiseSpec>,
    /// Per noise, the mean swap distance of each election. Election `i`
    /// has the same true positions under every noise.
    pub per_election: Vec<Vec<f64>>,
}

impl SwapDistanceStudy {
    pub fn summaries(&self) -> Vec<Summary> {
        self.per_election.iter().map(|v| Summary::of(v)).collect()
    }

    /// Long-format CSV: `noise,election,mean_swap_distance`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| HarnessError::config(format!("CSV encoding failed: {e}"));
        w.write_record(["noise", "election", "mean_swap_distance"]).map_err(csv_err)?;
        for (noise, values) in self.noises.iter().zip(&self.per_election) {
            let noise = noise.to_string();
            for (i, d) in values.iter().enumerate() {
                w.write_record([noise.as_str(), &i.to_string(), &d.to_string()]).map_err(csv_err)?;
            }
        }
        let bytes = w.into_inner().map_err(|e| HarnessError::config(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
    }
}

/// Mean swap distance from single-peakedness, against the true-position
/// axis, of `elections` random electorates per noise.
pub fn swap_distance_study(
    noises: &[NoiseSpec],
    elections: usize,
    n_voters: usize,
    n_candidates: usize,
    seed: u64,
) -> Result<SwapDistanceStudy> {
    if noises.is_empty() || elections == 0 {
        return Err(HarnessError::config("a swap-distance study needs a noise and an election"));
    }
    let mut per_election = Vec::with_capacity(noises.len());
    for noise in noises {
        let spec = ScenarioSpec {
            n_voters,
            n_candidates,
            noise: noise.clone(),
            target: TargetRule::Random,
            graph: GraphSource::Spatial(SpatialParams::default()),
        };
        spec.validate()?;
        let values = (0..elections)
            .into_par_iter()
            .map(|i| Ok(spec.electorate(seed, i)?.mean_swap_distance()?))
            .collect::<Result<Vec<f64>>>()?;
        per_election.push(values);
    }
    Ok(SwapDistanceStudy { noises: noises.to_vec(), per_election })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_noise_is_single_peaked_and_noise_increases_distance() {
        let noises = [
            NoiseSpec::Zero,
            NoiseSpec::Gaussian { mean: 0.0, variance: 0.08 },
            NoiseSpec::Gaussian { mean: 0.0, variance: 1.0 },
        ];
        let study = swap_distance_study(&noises, 300, 20, 5, 4).unwrap();
        let s = study.summaries();
        assert_eq!(s[0].mean, 0.0);
        assert!(s[0].mean < s[1].mean && s[1].mean < s[2].mean, "{s:?}");
        assert_eq!(study.to_csv().unwrap().lines().count(), 1 + 900);
    }
}
