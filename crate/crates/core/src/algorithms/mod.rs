//! Online learners and offline reference solvers.

mod offline;
mod online;

pub use offline::{
    brute_force_opt, offline_greedy, offline_stochastic_greedy, OfflineResult,
    BRUTE_FORCE_MAX_ARMS, BRUTE_FORCE_MAX_SUBSETS,
};
pub(crate) use online::explore_once;
pub use online::{
    etcg_epsilon, run_etcg, run_random_constant, run_sgb, run_sgb_anytime, SgbOptions,
};
