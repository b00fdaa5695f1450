//! An electorate embedded in a social network, plus the influence step size.

use alloc::vec::Vec;

use crate::graph::SocialNetwork;
use crate::model::{CandidateId, Electorate, Tally};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub electorate: Electorate,
    pub network: SocialNetwork,
    pub delta: f64,
}

impl Scenario {
    /// Node `v` of the network is voter `v`.
    pub fn new(electorate: Electorate, network: SocialNetwork, delta: f64) -> Result<Self> {
        if network.n() != electorate.n_voters() {
            return Err(Error::config(alloc::format!(
                "network has {} nodes but the electorate has {} voters",
                network.n(),
                electorate.n_voters()
            )));
        }
        if !(delta > 0.0 && delta <= 2.0) {
            return Err(Error::config("delta must lie in (0, 2]"));
        }
        Ok(Scenario { electorate, network, delta })
    }

    pub fn n(&self) -> usize {
        self.network.n()
    }

    pub fn target(&self) -> CandidateId {
        self.electorate.target()
    }

    /// Vote of every voter if influenced once, taken in isolation. Influence
    /// on one voter never affects another, so any activated set can be
    /// scored from this table.
    pub fn influenced_votes(&self) -> Vec<CandidateId> {
        (0..self.n()).map(|v| self.electorate.influenced_voter(v, self.delta).1).collect()
    }

    /// Scorer of the change in margin for arbitrary activated sets.
    pub fn dmov_evaluator(&self) -> DmovEvaluator {
        DmovEvaluator::new(&self.electorate, self.influenced_votes())
    }
}

/// Computes the change in the target's margin after influencing a set of
/// voters, from precomputed per-voter outcomes.
#[derive(Debug, Clone)]
pub struct DmovEvaluator {
    target: CandidateId,
    before: Tally,
    base_mov: i64,
    current: Vec<CandidateId>,
    after: Vec<CandidateId>,
    scratch: Vec<i64>,
}

impl DmovEvaluator {
    pub fn new(electorate: &Electorate, influenced_votes: Vec<CandidateId>) -> Self {
        let before = electorate.tally();
        let target = electorate.target();
        DmovEvaluator {
            target,
            base_mov: before.margin_of_victory(target),
            scratch: before.votes().iter().map(|&v| v as i64).collect(),
            before,
            current: electorate.votes().to_vec(),
            after: influenced_votes,
        }
    }

    pub fn before(&self) -> &Tally {
        &self.before
    }

    /// Largest attainable change: `|V| - |V_{c*}| + |V_{best opponent}|`.
    pub fn max_dmov(&self) -> usize {
        crate::model::max_delta_mov(&self.before, self.target)
    }

    /// Vote of `v` once influenced.
    pub fn influenced_vote(&self, v: usize) -> CandidateId {
        self.after[v]
    }

    pub fn current_vote(&self, v: usize) -> CandidateId {
        self.current[v]
    }

    /// Change in margin when exactly the voters yielded by `activated` are
    /// influenced. Each voter must appear at most once.
    pub fn dmov<I: IntoIterator<Item = usize>>(&mut self, activated: I) -> i64 {
        for (s, &b) in self.scratch.iter_mut().zip(self.before.votes()) {
            *s = b as i64;
        }
        for v in activated {
            self.scratch[self.current[v]] -= 1;
            self.scratch[self.after[v]] += 1;
        }
        let mut best_opp = i64::MIN;
        for (c, &count) in self.scratch.iter().enumerate() {
            if c != self.target && count > best_opp {
                best_opp = count;
            }
        }
        self.scratch[self.target] - best_opp - self.base_mov
    }

    /// [`Self::dmov`] for an activated set given as a bitmask.
    pub fn dmov_mask(&mut self, mask: u64) -> i64 {
        self.dmov(MaskIter(mask))
    }
}

/// Iterates the set bits of a mask, ascending.
#[derive(Debug, Clone, Copy)]
pub struct MaskIter(pub u64);

impl Iterator for MaskIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }
}
