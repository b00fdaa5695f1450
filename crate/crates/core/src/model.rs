//! Spatial electorate.
//!
//! Candidates and voters sit on the political spectrum `[-1, 1]`. Each voter
//! sees every candidate through a blurred view `x_c^v = clip(x_c + noise)`
//! and votes (plurality) for the candidate whose viewed position is closest to
//! their own. Influence moves a voter by at most `delta` towards their view of
//! the target candidate.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::num::clip_unit;
use crate::{Error, Result};

pub type CandidateId = usize;
pub type VoterId = usize;

/// Largest candidate count accepted by [`swap_distance_to_single_peaked`].
pub const MAX_SWAP_DISTANCE_CANDIDATES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub id: CandidateId,
    pub position: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Voter {
    pub id: VoterId,
    pub position: f64,
}

/// One component of a Gaussian mixture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureComponent {
    pub weight: f64,
    pub mean: f64,
    pub variance: f64,
}

/// Distribution of the noise added to a candidate's true position in a
/// voter's view. The noise does not depend on the candidate position.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum NoiseSpec {
    #[default]
    Zero,
    Uniform {
        lo: f64,
        hi: f64,
    },
    Gaussian {
        mean: f64,
        variance: f64,
    },
    GaussianMixture(Vec<MixtureComponent>),
}

impl NoiseSpec {
    /// The bimodal noise `1/2 N(-0.7, 1) + 1/2 N(0.7, 1)`.
    pub fn symmetric_bimodal() -> Self {
        NoiseSpec::GaussianMixture(vec![
            MixtureComponent { weight: 0.5, mean: -0.7, variance: 1.0 },
            MixtureComponent { weight: 0.5, mean: 0.7, variance: 1.0 },
        ])
    }

    pub fn validate(&self) -> Result<()> {
        fn check_gaussian(mean: f64, variance: f64) -> Result<()> {
            if !mean.is_finite() || !variance.is_finite() {
                return Err(Error::config("noise parameters must be finite"));
            }
            if variance < 0.0 {
                return Err(Error::config("noise variance must be non-negative"));
            }
            Ok(())
        }
        match self {
            NoiseSpec::Zero => Ok(()),
            NoiseSpec::Uniform { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return Err(Error::config("uniform noise requires finite lo < hi"));
                }
                Ok(())
            }
            NoiseSpec::Gaussian { mean, variance } => check_gaussian(*mean, *variance),
            NoiseSpec::GaussianMixture(components) => {
                if components.is_empty() {
                    return Err(Error::config("mixture needs at least one component"));
                }
                let mut total = 0.0;
                for c in components {
                    check_gaussian(c.mean, c.variance)?;
                    if !(c.weight >= 0.0) {
                        return Err(Error::config("mixture weights must be non-negative"));
                    }
                    total += c.weight;
                }
                if (total - 1.0).abs() > 1e-9 {
                    return Err(Error::config("mixture weights must sum to 1"));
                }
                Ok(())
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, NoiseSpec::Zero)
    }

    /// Draw one noise term. `_position` is the candidate's true position; it
    /// is accepted for a position-dependent noise model but currently unused.
    /// The spec must be valid.
    pub fn sample<R: Rng + ?Sized>(&self, _position: f64, rng: &mut R) -> f64 {
        match self {
            NoiseSpec::Zero => 0.0,
            NoiseSpec::Uniform { lo, hi } => rng.random_range(*lo..*hi),
            NoiseSpec::Gaussian { mean, variance } => gaussian(*mean, *variance, rng),
            NoiseSpec::GaussianMixture(components) => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let mut chosen = components[components.len() - 1];
                for c in components {
                    acc += c.weight;
                    if u < acc {
                        chosen = *c;
                        break;
                    }
                }
                gaussian(chosen.mean, chosen.variance, rng)
            }
        }
    }
}

fn gaussian<R: Rng + ?Sized>(mean: f64, variance: f64, rng: &mut R) -> f64 {
    if variance == 0.0 {
        return mean;
    }
    Normal::new(mean, libm::sqrt(variance)).expect("validated gaussian parameters").sample(rng)
}

impl fmt::Display for NoiseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseSpec::Zero => write!(f, "zero"),
            NoiseSpec::Uniform { lo, hi } => write!(f, "uniform({lo},{hi})"),
            NoiseSpec::Gaussian { mean, variance } => write!(f, "gaussian({mean},{variance})"),
            NoiseSpec::GaussianMixture(cs) => {
                write!(f, "mixture(")?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ";")?;
                    }
                    write!(f, "{}:{}:{}", c.weight, c.mean, c.variance)?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Parses the [`Display`](fmt::Display) form: `zero`, `uniform(lo,hi)`,
/// `gaussian(mean,variance)` and `mixture(w:mean:var;w:mean:var;...)`.
impl FromStr for NoiseSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::config(alloc::format!("unrecognized noise spec `{s}`"));
        let lower = s.to_ascii_lowercase();
        if lower == "zero" || lower == "0" || lower == "none" {
            return Ok(NoiseSpec::Zero);
        }
        let open = s.find('(').ok_or_else(bad)?;
        if !s.ends_with(')') {
            return Err(bad());
        }
        let name = lower[..open].trim();
        let body = &s[open + 1..s.len() - 1];
        let reals = |text: &str, sep: char| -> Result<Vec<f64>> {
            text.split(sep).map(|t| t.trim().parse::<f64>().map_err(|_| bad())).collect()
        };
        let spec = match name {
            "uniform" | "u" => match reals(body, ',')?.as_slice() {
                [lo, hi] => NoiseSpec::Uniform { lo: *lo, hi: *hi },
                _ => return Err(bad()),
            },
            "gaussian" | "normal" | "n" => match reals(body, ',')?.as_slice() {
                [mean, variance] => NoiseSpec::Gaussian { mean: *mean, variance: *variance },
                _ => return Err(bad()),
            },
            "mixture" => {
                let mut components = Vec::new();
                for part in body.split(';') {
                    match reals(part, ':')?.as_slice() {
                        [weight, mean, variance] => {
                            components.push(MixtureComponent { weight: *weight, mean: *mean, variance: *variance })
                        }
                        _ => return Err(bad()),
                    }
                }
                NoiseSpec::GaussianMixture(components)
            }
            _ => return Err(bad()),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Every voter's view of every candidate, row-major by voter.
#[derive(Debug, Clone, PartialEq)]
pub struct ViewMatrix {
    n_voters: usize,
    n_candidates: usize,
    entries: Vec<f64>,
}

impl ViewMatrix {
    /// Views equal to the true candidate positions.
    pub fn exact(candidates: &[Candidate], n_voters: usize) -> Self {
        let mut entries = Vec::with_capacity(n_voters * candidates.len());
        for _ in 0..n_voters {
            entries.extend(candidates.iter().map(|c| c.position));
        }
        ViewMatrix { n_voters, n_candidates: candidates.len(), entries }
    }

    pub fn from_entries(n_voters: usize, n_candidates: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != n_voters * n_candidates {
            return Err(Error::data(alloc::format!(
                "view matrix needs {} entries, got {}",
                n_voters * n_candidates,
                entries.len()
            )));
        }
        if entries.iter().any(|x| !(-1.0..=1.0).contains(x)) {
            return Err(Error::data("view entries must lie in [-1, 1]"));
        }
        Ok(ViewMatrix { n_voters, n_candidates, entries })
    }

    pub fn n_voters(&self) -> usize {
        self.n_voters
    }

    pub fn n_candidates(&self) -> usize {
        self.n_candidates
    }

    pub fn row(&self, voter: VoterId) -> &[f64] {
        let m = self.n_candidates;
        &self.entries[voter * m..(voter + 1) * m]
    }

    pub fn get(&self, voter: VoterId, candidate: CandidateId) -> f64 {
        self.entries[voter * self.n_candidates + candidate]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }
}

/// Draw every voter's view of every candidate, voter-major. Each entry is an
/// independent draw clipped to `[-1, 1]`.
pub fn sample_views<R: Rng + ?Sized>(
    candidates: &[Candidate],
    n_voters: usize,
    noise: &NoiseSpec,
    rng: &mut R,
) -> Result<ViewMatrix> {
    if candidates.is_empty() {
        return Err(Error::config("at least one candidate is required"));
    }
    noise.validate()?;
    let mut entries = Vec::with_capacity(n_voters * candidates.len());
    for _ in 0..n_voters {
        for c in candidates {
            entries.push(clip_unit(c.position + noise.sample(c.position, rng)));
        }
    }
    Ok(ViewMatrix { n_voters, n_candidates: candidates.len(), entries })
}

/// The candidate minimizing `|x_v - x_c^v|`. On an exact tie the hint wins if
/// it is among the minimizers, otherwise the smallest id does.
pub fn preferred_candidate(voter_position: f64, view_row: &[f64], hint: Option<CandidateId>) -> CandidateId {
    let mut best = 0;
    let mut best_dist = f64::INFINITY;
    for (c, &x) in view_row.iter().enumerate() {
        let d = (voter_position - x).abs();
        if d < best_dist {
            best = c;
            best_dist = d;
        }
    }
    if let Some(h) = hint {
        if h < view_row.len() && (voter_position - view_row[h]).abs() == best_dist {
            return h;
        }
    }
    best
}

/// Candidates from most to least preferred; distance ties go to the smaller id.
pub fn ranking(voter_position: f64, view_row: &[f64]) -> Vec<CandidateId> {
    let mut order: Vec<CandidateId> = (0..view_row.len()).collect();
    order.sort_by(|&a, &b| {
        let da = (voter_position - view_row[a]).abs();
        let db = (voter_position - view_row[b]).abs();
        da.total_cmp(&db).then(a.cmp(&b))
    });
    order
}

/// New position after one influence step of size `delta` towards `target_view`.
///
/// The result lies on the segment between the two points; once the voter is
/// within `delta` they land exactly on `target_view`.
pub fn apply_influence(voter_position: f64, target_view: f64, delta: f64) -> f64 {
    debug_assert!(delta > 0.0);
    let gap = target_view - voter_position;
    if gap.abs() <= delta {
        return target_view;
    }
    let moved = voter_position + delta * gap.signum();
    let (lo, hi) =
        if voter_position < target_view { (voter_position, target_view) } else { (target_view, voter_position) };
    moved.clamp(lo, hi)
}

/// Plurality vote counts per candidate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tally {
    votes: Vec<usize>,
}

impl Tally {
    pub fn new(votes: Vec<usize>) -> Self {
        Tally { votes }
    }

    pub fn from_ballots(ballots: &[CandidateId], n_candidates: usize) -> Self {
        let mut votes = vec![0; n_candidates];
        for &b in ballots {
            votes[b] += 1;
        }
        Tally { votes }
    }

    pub fn votes(&self) -> &[usize] {
        &self.votes
    }

    pub fn get(&self, c: CandidateId) -> usize {
        self.votes[c]
    }

    pub fn total(&self) -> usize {
        self.votes.iter().sum()
    }

    /// Strongest opponent of `target` and its count; ties go to the smaller id.
    pub fn best_opponent(&self, target: CandidateId) -> (CandidateId, usize) {
        let mut best = (usize::MAX, 0);
        for (c, &v) in self.votes.iter().enumerate() {
            if c != target && (best.0 == usize::MAX || v > best.1) {
                best = (c, v);
            }
        }
        best
    }

    pub fn margin_of_victory(&self, target: CandidateId) -> i64 {
        margin_of_victory(self, target)
    }

    /// Winner under plurality; ties go to the smaller id.
    pub fn winner(&self) -> CandidateId {
        let mut best = 0;
        for (c, &v) in self.votes.iter().enumerate() {
            if v > self.votes[best] {
                best = c;
            }
        }
        best
    }

    pub(crate) fn shift(&mut self, from: CandidateId, to: CandidateId) {
        if from != to {
            self.votes[from] -= 1;
            self.votes[to] += 1;
        }
    }
}

/// `|V_{c*}| - max_{c != c*} |V_c|`; negative when the target is behind.
pub fn margin_of_victory(tally: &Tally, target: CandidateId) -> i64 {
    let (_, opp) = tally.best_opponent(target);
    tally.get(target) as i64 - opp as i64
}

/// Change in the target's margin of victory between two tallies.
pub fn delta_mov(before: &Tally, after: &Tally, target: CandidateId) -> i64 {
    margin_of_victory(after, target) - margin_of_victory(before, target)
}

/// Largest value the change in margin can take from `before`:
/// `|V| - |V_{c*}| + |V_{best opponent}|`.
pub fn max_delta_mov(before: &Tally, target: CandidateId) -> usize {
    let (_, opp) = before.best_opponent(target);
    before.total() - before.get(target) + opp
}

/// Candidates, voters, fixed views, a target, and each voter's current vote.
///
/// The stored vote is what makes ties sticky: whenever a voter moves, their new
/// vote is computed with the previous vote as the tie-break hint.
#[derive(Debug, Clone, PartialEq)]
pub struct Electorate {
    candidates: Vec<Candidate>,
    candidate_positions: Vec<f64>,
    voters: Vec<Voter>,
    views: ViewMatrix,
    target: CandidateId,
    votes: Vec<CandidateId>,
}

impl Electorate {
    pub fn new(candidates: Vec<Candidate>, voters: Vec<Voter>, views: ViewMatrix, target: CandidateId) -> Result<Self> {
        if candidates.len() < 2 {
            return Err(Error::config("an election needs at least two candidates"));
        }
        for (i, c) in candidates.iter().enumerate() {
            if c.id != i {
                return Err(Error::data("candidate ids must be 0..m-1 in order"));
            }
            if !(-1.0..=1.0).contains(&c.position) {
                return Err(Error::data("candidate positions must lie in [-1, 1]"));
            }
        }
        for (i, v) in voters.iter().enumerate() {
            if v.id != i {
                return Err(Error::data("voter ids must be 0..n-1 in order"));
            }
            if !(-1.0..=1.0).contains(&v.position) {
                return Err(Error::data("voter positions must lie in [-1, 1]"));
            }
        }
        if views.n_voters() != voters.len() || views.n_candidates() != candidates.len() {
            return Err(Error::data("view matrix dimensions do not match the electorate"));
        }
        if target >= candidates.len() {
            return Err(Error::config("target is not a valid candidate id"));
        }
        let candidate_positions = candidates.iter().map(|c| c.position).collect();
        let votes = voters.iter().map(|v| preferred_candidate(v.position, views.row(v.id), None)).collect();
        Ok(Electorate { candidates, candidate_positions, voters, views, target, votes })
    }

    /// Build from bare positions. `views = None` means exact views.
    pub fn from_positions(
        candidate_positions: &[f64],
        voter_positions: &[f64],
        views: Option<ViewMatrix>,
        target: CandidateId,
    ) -> Result<Self> {
        let candidates: Vec<Candidate> =
            candidate_positions.iter().enumerate().map(|(id, &position)| Candidate { id, position }).collect();
        let voters: Vec<Voter> =
            voter_positions.iter().enumerate().map(|(id, &position)| Voter { id, position }).collect();
        let views = views.unwrap_or_else(|| ViewMatrix::exact(&candidates, voters.len()));
        Electorate::new(candidates, voters, views, target)
    }

    pub fn candidates(&self) -> &[Candidate] {
        &self.candidates
    }

    /// True candidate positions, indexed by id.
    pub fn candidate_positions(&self) -> &[f64] {
        &self.candidate_positions
    }

    pub fn voters(&self) -> &[Voter] {
        &self.voters
    }

    pub fn views(&self) -> &ViewMatrix {
        &self.views
    }

    pub fn target(&self) -> CandidateId {
        self.target
    }

    pub fn n_voters(&self) -> usize {
        self.voters.len()
    }

    pub fn n_candidates(&self) -> usize {
        self.candidates.len()
    }

    pub fn position(&self, v: VoterId) -> f64 {
        self.voters[v].position
    }

    /// Current vote of every voter.
    pub fn votes(&self) -> &[CandidateId] {
        &self.votes
    }

    pub fn tally(&self) -> Tally {
        Tally::from_ballots(&self.votes, self.candidates.len())
    }

    pub fn with_target(mut self, target: CandidateId) -> Result<Self> {
        if target >= self.candidates.len() {
            return Err(Error::config("target is not a valid candidate id"));
        }
        self.target = target;
        Ok(self)
    }

    /// Position and vote voter `v` would have after one influence step.
    pub fn influenced_voter(&self, v: VoterId, delta: f64) -> (f64, CandidateId) {
        let row = self.views.row(v);
        let x = apply_influence(self.voters[v].position, row[self.target], delta);
        (x, preferred_candidate(x, row, Some(self.votes[v])))
    }

    /// Tally after influencing `activated`, without building a new snapshot.
    pub fn tally_after(&self, activated: &[VoterId], delta: f64) -> Tally {
        let mut t = self.tally();
        for &v in activated {
            let (_, vote) = self.influenced_voter(v, delta);
            t.shift(self.votes[v], vote);
        }
        t
    }

    /// Move every voter in `activated` one step towards the target.
    pub fn apply_influence(&mut self, activated: &[VoterId], delta: f64) {
        for &v in activated {
            let (x, vote) = self.influenced_voter(v, delta);
            self.voters[v].position = x;
            self.votes[v] = vote;
        }
    }

    /// New snapshot with `activated` influenced.
    pub fn influenced(&self, activated: &[VoterId], delta: f64) -> Electorate {
        let mut next = self.clone();
        next.apply_influence(activated, delta);
        next
    }

    /// Vote the manipulator expects from voter `v`: the manipulator knows true positions
    /// but not the views.
    pub fn predicted_vote(&self, v: VoterId) -> CandidateId {
        preferred_candidate(self.voters[v].position, &self.candidate_positions, Some(self.votes[v]))
    }

    /// Candidate ids ordered by true position (ties by id): the left-to-right axis.
    pub fn axis(&self) -> Vec<CandidateId> {
        let mut axis: Vec<CandidateId> = (0..self.candidates.len()).collect();
        axis.sort_by(|&a, &b| self.candidate_positions[a].total_cmp(&self.candidate_positions[b]).then(a.cmp(&b)));
        axis
    }

    pub fn ranking_of(&self, v: VoterId) -> Vec<CandidateId> {
        ranking(self.voters[v].position, self.views.row(v))
    }

    /// Mean over voters of the swap distance from single-peakedness on [`Self::axis`].
    pub fn mean_swap_distance(&self) -> Result<f64> {
        let axis = self.axis();
        let mut total = 0usize;
        for v in 0..self.voters.len() {
            total += swap_distance_to_single_peaked(&self.ranking_of(v), &axis)?;
        }
        Ok(total as f64 / self.voters.len().max(1) as f64)
    }
}

/// Recount every voter's preference, using the current vote as tie-break hint.
pub fn tally(electorate: &Electorate) -> Tally {
    let ballots: Vec<CandidateId> = (0..electorate.n_voters())
        .map(|v| preferred_candidate(electorate.position(v), electorate.views().row(v), Some(electorate.votes()[v])))
        .collect();
    Tally::from_ballots(&ballots, electorate.n_candidates())
}

/// Number of discordant pairs between two orderings of the same items.
pub fn kendall_tau_distance(a: &[usize], b: &[usize]) -> usize {
    let mut pos_in_b = vec![0usize; a.len()];
    for (i, &x) in b.iter().enumerate() {
        pos_in_b[x] = i;
    }
    let mapped: Vec<usize> = a.iter().map(|&x| pos_in_b[x]).collect();
    let mut inversions = 0;
    for i in 0..mapped.len() {
        for j in i + 1..mapped.len() {
            if mapped[i] > mapped[j] {
                inversions += 1;
            }
        }
    }
    inversions
}

/// All `2^(m-1)` rankings of axis slots `0..m` that are single-peaked on the
/// axis, best first.
pub fn single_peaked_rankings(m: usize) -> Vec<Vec<usize>> {
    fn build(lo: usize, hi: usize, tail: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if lo == hi {
            let mut r = Vec::with_capacity(tail.len() + 1);
            r.push(lo);
            r.extend(tail.iter().rev());
            out.push(r);
            return;
        }
        tail.push(lo);
        build(lo + 1, hi, tail, out);
        tail.pop();
        tail.push(hi);
        build(lo, hi - 1, tail, out);
        tail.pop();
    }
    let mut out = Vec::new();
    if m > 0 {
        build(0, m - 1, &mut Vec::with_capacity(m), &mut out);
    }
    out
}

fn axis_slots(ranking: &[CandidateId], axis: &[CandidateId]) -> Result<Vec<usize>> {
    if ranking.len() != axis.len() {
        return Err(Error::config("ranking and axis have different lengths"));
    }
    let m = axis.len();
    let mut slot = vec![usize::MAX; m];
    for (i, &c) in axis.iter().enumerate() {
        if c >= m || slot[c] != usize::MAX {
            return Err(Error::config("axis is not a permutation of 0..m-1"));
        }
        slot[c] = i;
    }
    let mut seen = vec![false; m];
    let mut out = Vec::with_capacity(m);
    for &c in ranking {
        if c >= m || seen[c] {
            return Err(Error::config("ranking is not a permutation of the axis"));
        }
        seen[c] = true;
        out.push(slot[c]);
    }
    Ok(out)
}

/// Whether `ranking` is single-peaked on `axis`: every prefix of the ranking
/// occupies a contiguous stretch of the axis.
pub fn is_single_peaked(ranking: &[CandidateId], axis: &[CandidateId]) -> Result<bool> {
    let slots = axis_slots(ranking, axis)?;
    let (mut lo, mut hi) = (usize::MAX, 0usize);
    for (k, &s) in slots.iter().enumerate() {
        lo = lo.min(s);
        hi = hi.max(s);
        if hi - lo != k {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Minimum number of adjacent swaps turning `ranking` into a ranking that is
/// single-peaked on `axis`. Enumerates all single-peaked rankings, so `m` is
/// capped at [`MAX_SWAP_DISTANCE_CANDIDATES`].
pub fn swap_distance_to_single_peaked(ranking: &[CandidateId], axis: &[CandidateId]) -> Result<usize> {
    if axis.len() > MAX_SWAP_DISTANCE_CANDIDATES {
        return Err(Error::capability(alloc::format!(
            "swap distance enumeration supports at most {MAX_SWAP_DISTANCE_CANDIDATES} candidates, got {}",
            axis.len()
        )));
    }
    let slots = axis_slots(ranking, axis)?;
    Ok(single_peaked_rankings(axis.len()).iter().map(|sp| kendall_tau_distance(&slots, sp)).min().unwrap_or(0))
}

/// Human-readable candidate list, e.g. for diagnostics.
pub fn describe_positions(positions: &[f64]) -> String {
    let mut s = String::new();
    for (i, p) in positions.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        s.push_str(&alloc::format!("{p:.3}"));
    }
    s
}
