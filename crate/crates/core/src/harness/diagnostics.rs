use crate::algorithms::explore_once;
use crate::env::Environment;
use crate::{BanditParams, Error, Result, SimRng};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CleanEventEstimate {
    pub runs: usize,
    pub clean_runs: usize,
    /// Radius actually used: `rad_scale·√(ln T / m)`.
    pub radius: f64,
    /// `1 − 2/T`.
    pub bound: f64,
}

impl CleanEventEstimate {
    pub fn frequency(&self) -> f64 {
        self.clean_runs as f64 / self.runs as f64
    }

    /// Binomial standard error of the frequency evaluated at `bound`.
    pub fn bound_std_error(&self) -> f64 {
        (self.bound * (1.0 - self.bound) / self.runs as f64).sqrt()
    }
}

/// Replays the exploration schedule `repetitions` times and counts the runs
/// in which every candidate's empirical mean lies strictly within the radius
/// of its exact expectation.
pub fn estimate_clean_event_rate<E: Environment + ?Sized>(
    env: &E,
    params: &BanditParams,
    repetitions: usize,
    rad_scale: f64,
    rng: &mut SimRng,
) -> Result<CleanEventEstimate> {
    if !env.has_exact_oracle() {
        return Err(Error::InexactOracle);
    }
    if repetitions == 0 {
        return Err(Error::domain("need at least one repetition"));
    }
    if rad_scale.is_nan() || rad_scale <= 0.0 {
        return Err(Error::domain("radius scale must be positive"));
    }
    let radius = rad_scale * params.rad();
    let mut clean_runs = 0;
    for _ in 0..repetitions {
        let epoch = explore_once(env, params, rng)?;
        if epoch.phases.len() != params.k() {
            return Err(Error::domain("exploration did not complete every phase"));
        }
        let mut clean = true;
        'check: for (i, phase) in epoch.phases.iter().enumerate() {
            let mut action = epoch.committed_arms[..i].to_vec();
            for (&arm, &mean) in phase.candidates.iter().zip(&phase.means) {
                action.push(arm);
                let expected = env.expected(&action)?.mean;
                action.pop();
                if (mean - expected).abs() >= radius {
                    clean = false;
                    break 'check;
                }
            }
        }
        clean_runs += usize::from(clean);
    }
    Ok(CleanEventEstimate {
        runs: repetitions,
        clean_runs,
        radius,
        bound: 1.0 - 2.0 / params.t_horizon() as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{preferential_attachment, CascadeEnv, CoverageInstance, CoverageParams};
    use crate::rng_from_seed;
    use crate::schedule::minimal_valid_horizon;
    use std::sync::Arc;

    fn params_for(n: usize, k: usize) -> BanditParams {
        let t = minimal_valid_horizon(n, k).unwrap();
        BanditParams::derive(n, k, t, None).unwrap().0
    }

    #[test]
    fn noiseless_env_is_always_clean() {
        let probs = (0..30)
            .map(|i| if i % 4 == 0 { 1.0 } else { 0.0 })
            .collect();
        let env = CoverageInstance::new(10, 3, probs).unwrap();
        let est =
            estimate_clean_event_rate(&env, &params_for(10, 3), 50, 1.0, &mut rng_from_seed(0))
                .unwrap();
        assert_eq!(est.frequency(), 1.0);
    }

    #[test]
    fn clean_event_frequency_meets_bound() {
        let env = CoverageInstance::generate(
            CoverageParams {
                arms: 10,
                universe: 12,
                p_max: 0.7,
                density: 0.4,
            },
            &mut rng_from_seed(11),
        )
        .unwrap();
        let params = params_for(10, 3);
        let est =
            estimate_clean_event_rate(&env, &params, 500, 1.0, &mut rng_from_seed(1)).unwrap();
        assert!(est.frequency() >= est.bound - 3.0 * est.bound_std_error());
        let loose =
            estimate_clean_event_rate(&env, &params, 100, 10.0, &mut rng_from_seed(2)).unwrap();
        assert_eq!(loose.frequency(), 1.0);
    }

    #[test]
    fn needs_exact_oracle() {
        let graph = Arc::new(preferential_attachment(20, 2, &mut rng_from_seed(0)).unwrap());
        let env = CascadeEnv::new(graph, 0.1, 10, 0).unwrap();
        let err =
            estimate_clean_event_rate(&env, &params_for(20, 2), 5, 1.0, &mut rng_from_seed(0));
        assert!(matches!(err, Err(Error::InexactOracle)));
    }
}
