//! Invariants of the learners and oracles on random small instances.

use proptest::prelude::*;

use sgb_core::algorithms::{
    brute_force_opt, etcg_epsilon, offline_greedy, offline_stochastic_greedy, run_etcg, run_sgb,
    SgbOptions,
};
use sgb_core::env::{check_monotone_submodular, CoverageInstance, CoverageParams};
use sgb_core::harness::{cumulative_regret_series, derive_run_seed};
use sgb_core::rng_from_seed;
use sgb_core::schedule::minimal_valid_horizon;

fn instance(arms: usize, universe: usize, seed: u64) -> CoverageInstance {
    CoverageInstance::generate(
        CoverageParams {
            arms,
            universe,
            p_max: 0.7,
            density: 0.4,
        },
        &mut rng_from_seed(seed),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sgb_trace_shape(arms in 4usize..16, k_frac in 0.0f64..1.0, extra in 0usize..3000, seed in any::<u64>()) {
        let k = 1 + ((arms - 1) as f64 * k_frac) as usize;
        let env = instance(arms, 8, seed);
        let t = minimal_valid_horizon(arms, k).unwrap() + extra;
        let trace = run_sgb(&env, k, t, SgbOptions::default(), &mut rng_from_seed(seed ^ 1)).unwrap();
        let params = trace.params().unwrap();
        let explore = params.exploration_length();
        prop_assert_eq!(trace.len(), t);
        prop_assert_eq!(trace.exploration_end(), explore);
        let committed = trace.committed_arms();
        prop_assert_eq!(committed.len(), k);
        let mut start = 0;
        for (i, &end) in trace.phase_ends().iter().enumerate() {
            prop_assert_eq!(end - start, params.m() * params.sample_size(i + 1));
            for step in start..end {
                let a = trace.action(step);
                prop_assert_eq!(a.len(), i + 1);
                prop_assert_eq!(&a[..i], &committed[..i]);
            }
            start = end;
        }
        for step in explore..t {
            prop_assert_eq!(trace.action(step), committed);
        }
        prop_assert!(trace.rewards.iter().all(|r| (0.0..=1.0).contains(r)));
    }

    #[test]
    fn beta_one_matches_etcg(arms in 3usize..12, seed in any::<u64>()) {
        let k = 1 + (seed as usize % arms.min(4));
        let env = instance(arms, 6, seed);
        let t = minimal_valid_horizon(arms, k).unwrap();
        // the β = 1 schedule may overrun this horizon, so both runs are forced
        let opts = SgbOptions { epsilon: Some(etcg_epsilon(k).unwrap()), force: true };
        let a = run_sgb(&env, k, t, opts, &mut rng_from_seed(seed)).unwrap();
        let b = run_etcg(&env, k, t, true, &mut rng_from_seed(seed)).unwrap();
        prop_assert!(a.bitwise_eq(&b));
    }

    #[test]
    fn greedy_bounds(arms in 2usize..10, universe in 1usize..8, seed in any::<u64>()) {
        let env = instance(arms, universe, seed);
        prop_assert!(check_monotone_submodular(&env, 1e-12).unwrap().passed());
        let mut last = 0.0;
        for k in 0..=arms.min(4) {
            let greedy = offline_greedy(&env, k).unwrap();
            let opt = brute_force_opt(&env, k).unwrap();
            prop_assert!(greedy.value >= (1.0 - (-1.0f64).exp()) * opt.value - 1e-12);
            prop_assert!(greedy.value <= opt.value + 1e-12);
            prop_assert!(greedy.value >= last - 1e-15);
            prop_assert_eq!(greedy.evaluations, (0..k).map(|i| arms - i).sum::<usize>().max(usize::from(k == 0)));
            last = greedy.value;
        }
    }

    #[test]
    fn stochastic_greedy_tiny_epsilon_is_greedy(arms in 2usize..12, seed in any::<u64>()) {
        let env = instance(arms, 5, seed);
        let k = 1 + seed as usize % arms.min(4);
        let eps = etcg_epsilon(k).unwrap() / 2.0;
        let sg = offline_stochastic_greedy(&env, k, eps, &mut rng_from_seed(seed)).unwrap();
        prop_assert_eq!(sg, offline_greedy(&env, k).unwrap());
    }

    #[test]
    fn regret_ends_at_summary_regret(seed in any::<u64>()) {
        let env = instance(8, 6, seed);
        let t = minimal_valid_horizon(8, 2).unwrap();
        let trace = run_sgb(&env, 2, t, SgbOptions::default(), &mut rng_from_seed(derive_run_seed(seed, 0, 2, t, 0))).unwrap();
        let f_ref = offline_greedy(&env, 2).unwrap().value;
        let series = cumulative_regret_series(&trace, f_ref).unwrap();
        let direct = t as f64 * f_ref - trace.cumulative_reward();
        prop_assert!((series[t - 1] - direct).abs() < 1e-6);
    }
}
