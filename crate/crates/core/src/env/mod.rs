//! Stochastic reward sources with expected-value oracles.

mod cascade;
mod check;
mod coverage;
mod graph;

pub use cascade::{
    estimate_expected_spread, influence_reward, simulate_cascade, CascadeEnv, LiveEdgeOracle,
};
pub use check::{check_monotone_submodular, SubmodularityReport, Violation};
pub use coverage::{coverage_expected, coverage_sample, CoverageInstance, CoverageParams};
pub use graph::{emit_edge_list, load_edge_list, preferential_attachment, Graph, LoadedGraph};

use crate::{ArmId, Result, SimRng};

/// A point estimate of an expected value with its standard error
/// (zero for exact oracles).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
}

impl Estimate {
    pub fn exact(mean: f64) -> Self {
        Self {
            mean,
            std_error: 0.0,
        }
    }
}

/// A deterministic set function `f: 2^Ω → ℝ`.
pub trait SetOracle: Sync {
    fn arm_count(&self) -> usize;

    fn value(&self, set: &[ArmId]) -> Result<f64>;
}

/// A stochastic reward source over subsets of `0..arm_count()`.
///
/// Sampled rewards lie in `[0, 1]` and are i.i.d. given the action; their
/// expectation is monotone and submodular.
pub trait Environment: Send + Sync {
    fn arm_count(&self) -> usize;

    /// Draws one reward `f_t(action)`.
    fn sample(&self, action: &[ArmId], rng: &mut SimRng) -> Result<f64>;

    /// The expected reward `f(action)`.
    fn expected(&self, action: &[ArmId]) -> Result<Estimate>;

    /// Whether [`Environment::expected`] is exact rather than estimated.
    fn has_exact_oracle(&self) -> bool;
}

impl<E: Environment + ?Sized> Environment for &E {
    fn arm_count(&self) -> usize {
        (**self).arm_count()
    }

    fn sample(&self, action: &[ArmId], rng: &mut SimRng) -> Result<f64> {
        (**self).sample(action, rng)
    }

    fn expected(&self, action: &[ArmId]) -> Result<Estimate> {
        (**self).expected(action)
    }

    fn has_exact_oracle(&self) -> bool {
        (**self).has_exact_oracle()
    }
}

/// Views an environment's expected-value oracle as a [`SetOracle`].
pub struct ExpectedValue<'a, E: ?Sized>(pub &'a E);

impl<E: Environment + ?Sized> SetOracle for ExpectedValue<'_, E> {
    fn arm_count(&self) -> usize {
        self.0.arm_count()
    }

    fn value(&self, set: &[ArmId]) -> Result<f64> {
        Ok(self.0.expected(set)?.mean)
    }
}

/// Wraps a closure as a [`SetOracle`].
pub struct FnOracle<F> {
    arm_count: usize,
    f: F,
}

impl<F> FnOracle<F>
where
    F: Fn(&[ArmId]) -> f64 + Sync,
{
    pub fn new(arm_count: usize, f: F) -> Self {
        Self { arm_count, f }
    }
}

impl<F> SetOracle for FnOracle<F>
where
    F: Fn(&[ArmId]) -> f64 + Sync,
{
    fn arm_count(&self) -> usize {
        self.arm_count
    }

    fn value(&self, set: &[ArmId]) -> Result<f64> {
        Ok((self.f)(set))
    }
}

/// `f(S) = Σ_{a∈S} w_a`.
#[derive(Debug, Clone)]
pub struct ModularOracle {
    pub weights: Vec<f64>,
}

impl SetOracle for ModularOracle {
    fn arm_count(&self) -> usize {
        self.weights.len()
    }

    fn value(&self, set: &[ArmId]) -> Result<f64> {
        set.iter()
            .map(|&a| {
                self.weights
                    .get(a)
                    .copied()
                    .ok_or(crate::Error::UnknownArm {
                        arm: a,
                        arm_count: self.weights.len(),
                    })
            })
            .sum()
    }
}
