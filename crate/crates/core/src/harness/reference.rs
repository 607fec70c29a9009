use serde::{Deserialize, Serialize};

use crate::algorithms::{brute_force_opt, offline_greedy};
use crate::env::{Environment, Estimate, ExpectedValue};
use crate::{ArmId, Result};

/// How the per-step reference reward `f_ref` is defined.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceKind {
    /// `f(S^grd)` for the offline greedy set.
    #[default]
    OfflineGreedy,
    /// `(1 − 1/e)·f(S*)` with `S*` found by exhaustive search.
    BruteForce,
}

impl ReferenceKind {
    pub fn label(self) -> &'static str {
        match self {
            ReferenceKind::OfflineGreedy => "offline-greedy",
            ReferenceKind::BruteForce => "brute-force",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reference {
    pub kind: ReferenceKind,
    pub k: usize,
    /// `f_ref` with its standard error.
    pub value: Estimate,
    /// The set whose value defines the reference.
    pub set: Vec<ArmId>,
    pub evaluations: usize,
}

/// Computes `f_ref` from the environment's expected-value oracle.
pub fn compute_reference_value<E: Environment + ?Sized>(
    env: &E,
    k: usize,
    kind: ReferenceKind,
) -> Result<Reference> {
    let oracle = ExpectedValue(env);
    let (result, scale) = match kind {
        ReferenceKind::OfflineGreedy => (offline_greedy(&oracle, k)?, 1.0),
        ReferenceKind::BruteForce => (brute_force_opt(&oracle, k)?, 1.0 - (-1.0f64).exp()),
    };
    let estimate = env.expected(&result.selected)?;
    Ok(Reference {
        kind,
        k,
        value: Estimate {
            mean: scale * estimate.mean,
            std_error: scale * estimate.std_error,
        },
        set: result.selected,
        evaluations: result.evaluations + 1,
    })
}
