//! Per-run seed derivation.
//!
//! Each run's seed is a SplitMix64 chain over its coordinates:
//!
//! ```text
//! h = mix(master)
//! h = mix(h ^ method_index)
//! h = mix(h ^ k)
//! h = mix(h ^ horizon)
//! h = mix(h ^ rep)
//! ```
//!
//! where `mix(x)` adds `0x9E3779B97F4A7C15` and applies the SplitMix64
//! finaliser. The result depends only on the coordinates, so cells can run
//! in any order.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// One SplitMix64 step on `state`.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_run_seed(
    master: u64,
    method_index: usize,
    k: usize,
    horizon: usize,
    rep: usize,
) -> u64 {
    [method_index, k, horizon, rep]
        .iter()
        .fold(splitmix64(master), |h, &v| splitmix64(h ^ v as u64))
}
