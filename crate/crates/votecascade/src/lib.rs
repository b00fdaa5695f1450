//! Experiment harness for election manipulation through social influence:
//! file formats, replicated experiment grids, result tables, timing and the
//! swap-distance study.

pub mod error;
pub mod formats;
pub mod grid;
pub mod results;
pub mod scenarios;
pub mod stats;
pub mod swapdist;
pub mod timing;

pub use error::{HarnessError, Result};
