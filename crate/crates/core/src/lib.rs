//! Election manipulation through information diffusion in social networks
//! whose voters hold single-peaked, or nearly single-peaked, preferences.
//!
//! The crate is `no_std` (it needs `alloc`) and holds only the computational
//! pieces: the spatial electorate, the probabilistic network and its
//! generators, Independent Cascade diffusion, Monte Carlo estimators with
//! their sample-size calculators, the greedy approximation algorithm with an
//! exact brute-force oracle, the catalog of fast seed-selection heuristics, and
//! the multi-round campaign driver. File formats, timing, parallel
//! replication and the command line live in the `votecascade` crate.
//!
//! Every randomized operation takes an explicit [`rand::Rng`]; nothing reads
//! global state, so results are reproducible from a seed.

#![no_std]
#![warn(missing_debug_implementations, rust_2018_idioms)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod campaign;
pub mod diffusion;
pub mod error;
pub mod estimation;
pub mod graph;
pub mod greedy;
pub mod heuristics;
pub mod model;
pub mod num;
pub mod scenario;
pub mod stream;

pub use error::{Error, Result};
