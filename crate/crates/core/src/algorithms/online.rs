use crate::env::Environment;
use crate::schedule::{
    sample_candidate_set, select_empirical_best, BanditParams, HorizonReport, PhaseState,
};
use crate::trace::{Epoch, PhaseRecord, RunTrace};
use crate::{ArmId, Error, Result, SimRng};

/// Knobs for [`run_sgb`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SgbOptions {
    /// Replaces `ε*`. Changes `β` and the sample sizes; `m` stays horizon-optimal.
    pub epsilon: Option<f64>,
    /// Run even when the horizon check fails. Recorded in the trace.
    pub force: bool,
}

#[derive(Default)]
struct TraceBuilder {
    action_table: Vec<Vec<ArmId>>,
    steps: Vec<u32>,
    rewards: Vec<f64>,
    warnings: Vec<String>,
}

impl TraceBuilder {
    fn register(&mut self, action: Vec<ArmId>) -> u32 {
        self.action_table.push(action);
        (self.action_table.len() - 1) as u32
    }

    fn play<E: Environment + ?Sized>(&mut self, env: &E, id: u32, rng: &mut SimRng) -> Result<f64> {
        let reward = env.sample(&self.action_table[id as usize], rng)?;
        debug_assert!((0.0..=1.0).contains(&reward));
        self.steps.push(id);
        self.rewards.push(reward);
        Ok(reward)
    }

    fn finish(self, epochs: Vec<Epoch>, forced: bool) -> RunTrace {
        RunTrace {
            epochs,
            action_table: self.action_table,
            steps: self.steps,
            rewards: self.rewards,
            forced,
            warnings: self.warnings,
        }
    }
}

/// One explore-then-commit pass with the schedule for `horizon`, stopping
/// early after `max_steps` plays.
fn run_epoch<E: Environment + ?Sized>(
    env: &E,
    k: usize,
    horizon: usize,
    opts: SgbOptions,
    max_steps: usize,
    out: &mut TraceBuilder,
    rng: &mut SimRng,
) -> Result<Epoch> {
    let n = env.arm_count();
    let (params, warnings) = BanditParams::derive(n, k, horizon, opts.epsilon)?;
    out.warnings.extend(warnings);
    if let Some(reason) = HorizonReport::for_params(&params).failure_reason() {
        if !opts.force {
            return Err(Error::HorizonTooShort {
                n,
                k,
                horizon,
                reason,
            });
        }
        out.warnings
            .push(format!("horizon check bypassed: {reason}"));
    }

    let budget = max_steps.min(horizon);
    let mut epoch = Epoch {
        start: out.steps.len(),
        len: 0,
        params: Some(params.clone()),
        phase_ends: Vec::with_capacity(k),
        phases: Vec::with_capacity(k),
        committed_arms: Vec::with_capacity(k),
        scheduled_exploration: params.exploration_length(),
    };
    let mut played = 0;
    let mut remaining: Vec<ArmId> = (0..n).collect();

    'phases: for phase in 1..=k {
        let candidates = sample_candidate_set(&remaining, params.sample_size(phase), rng)?;
        let mut state =
            PhaseState::new(phase, epoch.committed_arms.clone(), candidates, params.m());
        for slot in 0..state.sample_size() {
            let id = out.register(state.action(slot));
            for _ in 0..params.m() {
                if played == budget {
                    break 'phases;
                }
                let reward = out.play(env, id, rng)?;
                state.record(slot, reward);
                played += 1;
            }
        }
        let chosen = select_empirical_best(&state)?;
        epoch.phases.push(PhaseRecord {
            means: state.means(),
            candidates: state.candidates,
            chosen,
        });
        epoch.phase_ends.push(played);
        epoch.committed_arms.push(chosen);
        remaining.retain(|&a| a != chosen);
    }

    if epoch.committed_arms.len() == k && played < budget {
        let id = out.register(epoch.committed_arms.clone());
        while played < budget {
            out.play(env, id, rng)?;
            played += 1;
        }
    }
    epoch.len = played;
    Ok(epoch)
}

/// Runs only the exploration phases of `params`, returning the epoch record.
pub(crate) fn explore_once<E: Environment + ?Sized>(
    env: &E,
    params: &BanditParams,
    rng: &mut SimRng,
) -> Result<Epoch> {
    if env.arm_count() != params.n() {
        return Err(Error::domain(format!(
            "schedule is for {} arms but the environment has {}",
            params.n(),
            env.arm_count()
        )));
    }
    let opts = SgbOptions {
        epsilon: Some(params.epsilon()),
        force: true,
    };
    let mut out = TraceBuilder::default();
    let steps = params.exploration_length();
    run_epoch(
        env,
        params.k(),
        params.t_horizon(),
        opts,
        steps,
        &mut out,
        rng,
    )
}

/// Stochastic-greedy explore-then-commit over `t_horizon` steps.
///
/// Phase `i` samples `s_i` unchosen arms, plays `S^(i-1) ∪ {a}` `m` times for
/// each, and commits the empirical best; `S^(k)` is then played for every
/// remaining step. If the horizon ends mid-exploration (only possible when
/// forced) the trace stops there.
pub fn run_sgb<E: Environment + ?Sized>(
    env: &E,
    k: usize,
    t_horizon: usize,
    opts: SgbOptions,
    rng: &mut SimRng,
) -> Result<RunTrace> {
    let mut out = TraceBuilder::default();
    let epoch = run_epoch(env, k, t_horizon, opts, t_horizon, &mut out, rng)?;
    Ok(out.finish(vec![epoch], opts.force))
}

/// `ε = e^(−k)`, the largest value with `β = 1`.
pub fn etcg_epsilon(k: usize) -> Result<f64> {
    let eps = (-(k as f64)).exp();
    if eps <= 0.0 || !eps.is_normal() {
        return Err(Error::domain(format!("e^-{k} is not representable")));
    }
    Ok(eps)
}

/// Explore-then-commit greedy: SGB with `β = 1`, so every phase explores all
/// `n − i + 1` remaining arms.
pub fn run_etcg<E: Environment + ?Sized>(
    env: &E,
    k: usize,
    t_horizon: usize,
    force: bool,
    rng: &mut SimRng,
) -> Result<RunTrace> {
    let opts = SgbOptions {
        epsilon: Some(etcg_epsilon(k)?),
        force,
    };
    run_sgb(env, k, t_horizon, opts, rng)
}

/// Doubling-trick wrapper: restarts SGB on windows of `t_initial`,
/// `2·t_initial`, `4·t_initial`, ... until `total_steps` are played. The last
/// window keeps its full-length schedule but is cut off.
pub fn run_sgb_anytime<E: Environment + ?Sized>(
    env: &E,
    k: usize,
    t_initial: usize,
    total_steps: usize,
    opts: SgbOptions,
    rng: &mut SimRng,
) -> Result<RunTrace> {
    if t_initial < 2 {
        return Err(Error::domain("initial window must be at least 2 steps"));
    }
    let mut out = TraceBuilder::default();
    let mut epochs = Vec::new();
    let mut window = t_initial;
    let mut consumed = 0;
    while consumed < total_steps {
        let epoch = run_epoch(env, k, window, opts, total_steps - consumed, &mut out, rng)?;
        consumed += epoch.len;
        epochs.push(epoch);
        window = window
            .checked_mul(2)
            .ok_or_else(|| Error::domain("doubling window overflowed"))?;
    }
    Ok(out.finish(epochs, opts.force))
}

/// Baseline: one uniformly random `k`-set played for all `t_horizon` steps.
pub fn run_random_constant<E: Environment + ?Sized>(
    env: &E,
    k: usize,
    t_horizon: usize,
    rng: &mut SimRng,
) -> Result<RunTrace> {
    let all: Vec<ArmId> = (0..env.arm_count()).collect();
    let chosen = sample_candidate_set(&all, k, rng)?;
    let mut out = TraceBuilder::default();
    let id = out.register(chosen.clone());
    for _ in 0..t_horizon {
        out.play(env, id, rng)?;
    }
    let epoch = Epoch {
        start: 0,
        len: t_horizon,
        params: None,
        phase_ends: Vec::new(),
        phases: Vec::new(),
        committed_arms: chosen,
        scheduled_exploration: 0,
    };
    Ok(out.finish(vec![epoch], false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{CoverageInstance, CoverageParams};
    use crate::rng_from_seed;
    use std::collections::BTreeSet;

    fn blocks() -> CoverageInstance {
        // distinct weights, arm 3 heaviest, then 0, 5, 1, ...
        CoverageInstance::disjoint_blocks(&[7, 3, 1, 9, 2, 5, 4, 6]).unwrap()
    }

    fn random_env(seed: u64, arms: usize) -> CoverageInstance {
        CoverageInstance::generate(
            CoverageParams {
                arms,
                universe: 20,
                p_max: 0.6,
                density: 0.4,
            },
            &mut rng_from_seed(seed),
        )
        .unwrap()
    }

    #[test]
    fn noiseless_modular_commits_top_k() {
        let env = blocks();
        let k = 3;
        let eps = etcg_epsilon(k).unwrap();
        let trace = run_sgb(
            &env,
            k,
            5000,
            SgbOptions {
                epsilon: Some(eps),
                force: false,
            },
            &mut rng_from_seed(1),
        )
        .unwrap();
        assert_eq!(trace.committed_arms(), &[3, 0, 7]);
        let trace = run_etcg(&env, k, 5000, false, &mut rng_from_seed(2)).unwrap();
        assert_eq!(trace.committed_arms(), &[3, 0, 7]);
    }

    #[test]
    fn deterministic_per_seed() {
        let env = random_env(5, 12);
        let a = run_sgb(
            &env,
            3,
            20_000,
            SgbOptions::default(),
            &mut rng_from_seed(44),
        )
        .unwrap();
        let b = run_sgb(
            &env,
            3,
            20_000,
            SgbOptions::default(),
            &mut rng_from_seed(44),
        )
        .unwrap();
        assert!(a.bitwise_eq(&b));
        let c = run_sgb(
            &env,
            3,
            20_000,
            SgbOptions::default(),
            &mut rng_from_seed(45),
        )
        .unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn trace_structure() {
        let env = random_env(7, 15);
        let (k, t) = (4, 30_000);
        let trace = run_sgb(&env, k, t, SgbOptions::default(), &mut rng_from_seed(3)).unwrap();
        let params = trace.params().unwrap().clone();
        assert_eq!(trace.len(), t);
        assert_eq!(trace.rewards.len(), t);
        let explore = params.exploration_length();
        assert_eq!(trace.exploration_end(), explore);
        assert_eq!(*trace.phase_ends().last().unwrap(), explore);
        assert!(trace.phase_ends().windows(2).all(|w| w[0] < w[1]));

        let committed = trace.committed_arms().to_vec();
        assert_eq!(committed.len(), k);
        let mut end = 0;
        for i in 1..=k {
            let start = end;
            end += params.m() * params.sample_size(i);
            assert_eq!(trace.phase_ends()[i - 1], end);
            for t in start..end {
                let action = trace.action(t);
                assert_eq!(action.len(), i);
                assert_eq!(&action[..i - 1], &committed[..i - 1]);
            }
        }
        for t in explore..t {
            assert_eq!(trace.action(t), committed.as_slice());
        }
        assert!(trace.actions().all(|a| a.len() <= k));
        assert!(trace.rewards.iter().all(|r| (0.0..=1.0).contains(r)));
        assert_eq!(trace.phase_of(0), (0, 1));
        assert_eq!(trace.phase_of(t - 1), (0, k + 1));
    }

    #[test]
    fn etcg_explores_every_remaining_arm() {
        let env = random_env(9, 10);
        let trace = run_etcg(&env, 3, 50_000, false, &mut rng_from_seed(8)).unwrap();
        for (i, phase) in trace.epochs[0].phases.iter().enumerate() {
            assert_eq!(phase.candidates.len(), 10 - i);
        }
        let sgb = run_sgb(
            &env,
            3,
            50_000,
            SgbOptions {
                epsilon: Some(etcg_epsilon(3).unwrap()),
                force: false,
            },
            &mut rng_from_seed(8),
        )
        .unwrap();
        assert!(trace.bitwise_eq(&sgb));
    }

    #[test]
    fn short_horizon_needs_force() {
        let env = random_env(1, 20);
        let err = run_sgb(&env, 4, 100, SgbOptions::default(), &mut rng_from_seed(0)).unwrap_err();
        assert!(matches!(err, Error::HorizonTooShort { .. }));
        let forced = run_sgb(
            &env,
            4,
            100,
            SgbOptions {
                epsilon: None,
                force: true,
            },
            &mut rng_from_seed(0),
        )
        .unwrap();
        assert!(forced.forced);
        assert_eq!(forced.len(), 100);
        assert!(!forced.warnings.is_empty());
    }

    #[test]
    fn truncated_exploration() {
        // ETCG over 20 arms with a horizon far below its exploration length.
        let env = random_env(2, 20);
        let trace = run_etcg(&env, 4, 500, true, &mut rng_from_seed(0)).unwrap();
        assert_eq!(trace.len(), 500);
        assert!(trace.scheduled_exploration() > 500);
        assert_eq!(trace.exploration_end(), 500);
        assert!(trace.committed_arms().len() < 4);
        assert!(trace.exploit_mean_reward().is_none());
    }

    #[test]
    fn exploration_exactly_fills_horizon() {
        let env = random_env(3, 10);
        let (params, _) = BanditParams::derive(10, 2, 5_000, None).unwrap();
        let explore = params.exploration_length();
        // m depends on T, so search for a horizon whose schedule fills it exactly
        let t = (explore..6_000).find(|&t| {
            BanditParams::derive(10, 2, t, Some(0.5))
                .unwrap()
                .0
                .exploration_length()
                == t
        });
        if let Some(t) = t {
            let trace = run_sgb(
                &env,
                2,
                t,
                SgbOptions {
                    epsilon: Some(0.5),
                    force: true,
                },
                &mut rng_from_seed(1),
            )
            .unwrap();
            assert_eq!(trace.len(), t);
            assert_eq!(trace.committed_arms().len(), 2);
            assert!(trace.exploit_mean_reward().is_none());
        }
    }

    #[test]
    fn anytime_windows() {
        let env = random_env(4, 10);
        let k = 2;
        let t0 = crate::schedule::minimal_valid_horizon(10, k).unwrap();
        let single = run_sgb(&env, k, t0, SgbOptions::default(), &mut rng_from_seed(5)).unwrap();
        let any = run_sgb_anytime(
            &env,
            k,
            t0,
            t0,
            SgbOptions::default(),
            &mut rng_from_seed(5),
        )
        .unwrap();
        assert!(single.bitwise_eq(&any));

        let any = run_sgb_anytime(
            &env,
            k,
            t0,
            3 * t0,
            SgbOptions::default(),
            &mut rng_from_seed(5),
        )
        .unwrap();
        let starts: Vec<_> = any.epochs.iter().map(|e| (e.start, e.len)).collect();
        assert_eq!(starts, vec![(0, t0), (t0, 2 * t0)]);

        let any = run_sgb_anytime(
            &env,
            k,
            t0,
            10 * t0,
            SgbOptions::default(),
            &mut rng_from_seed(5),
        )
        .unwrap();
        let lens: Vec<_> = any.epochs.iter().map(|e| e.len).collect();
        assert_eq!(lens, vec![t0, 2 * t0, 4 * t0, 3 * t0]);
        assert_eq!(any.epochs[3].params.as_ref().unwrap().t_horizon(), 8 * t0);
        assert_eq!(any.len(), 10 * t0);
    }

    #[test]
    fn random_constant_baseline() {
        let env = random_env(6, 12);
        let trace = run_random_constant(&env, 4, 1000, &mut rng_from_seed(2)).unwrap();
        assert!(trace.actions().all(|a| a.len() == 4));
        let set: BTreeSet<_> = trace.committed_arms().iter().collect();
        assert_eq!(set.len(), 4);
        assert!(
            trace.bitwise_eq(&run_random_constant(&env, 4, 1000, &mut rng_from_seed(2)).unwrap())
        );
        assert_eq!(trace.exploration_end(), 0);

        let zero = CoverageInstance::new(3, 2, vec![0.0; 6]).unwrap();
        let trace = run_random_constant(&zero, 2, 50, &mut rng_from_seed(0)).unwrap();
        assert!(trace.rewards.iter().all(|&r| r == 0.0));
        assert!(run_random_constant(&zero, 4, 50, &mut rng_from_seed(0)).is_err());
    }
}
