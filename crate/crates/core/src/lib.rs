//! Stochastic-greedy bandits for combinatorial full-bandit feedback with
//! monotone submodular rewards.
//!
//! The crate is split along the lines of a typical experiment stack:
//!
//! - [`schedule`] holds the exploration schedule arithmetic (`m`, `ε`, `β`,
//!   per-phase sample sizes) and the per-phase bookkeeping.
//! - [`env`] provides reward sources: an exact probabilistic-coverage family
//!   and an independent-cascade influence model over undirected graphs.
//! - [`algorithms`] contains the online learners (SGB, ETCG, anytime SGB,
//!   a random baseline) and offline oracles (greedy, stochastic greedy,
//!   brute force).
//! - [`harness`] runs sweeps, computes regret, and writes CSV.
//!
//! Every random choice flows through an explicit [`SimRng`] so runs replay
//! bit-for-bit from a seed.

pub mod algorithms;
pub mod env;
pub mod error;
pub mod harness;
pub mod schedule;
pub mod trace;

use rand::SeedableRng;

pub use error::{Error, Result};
pub use schedule::{BanditParams, HorizonReport};
pub use trace::RunTrace;

/// Index of a base arm in `0..n`.
pub type ArmId = usize;

/// The random stream used everywhere in the crate.
pub type SimRng = rand_chacha::ChaCha8Rng;

/// Builds a [`SimRng`] from a 64-bit seed.
pub fn rng_from_seed(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}
