//! Exploration schedule for stochastic-greedy explore-then-commit.
//!
//! A run over `n` arms with cardinality `k` and horizon `T` is fully
//! determined by a handful of numbers:
//!
//! - `m = ⌈(kT / (2n√ln T))^(2/3)⌉`, the number of plays per candidate action;
//! - `ε* = (n k² / (4 T ln T))^(1/3)`, the subsampling accuracy;
//! - `β = ln(1/ε) / k`;
//! - `s_i = ⌈(n − i + 1)·min{1, β}⌉`, the candidate count of phase `i`;
//! - `rad = √(ln T / m)`, the confidence radius of each empirical mean.
//!
//! All logarithms are natural.

use rand::seq::SliceRandom;

use crate::{ArmId, Error, Result, SimRng};

/// Largest `ε` used when the optimal value would reach or exceed 1.
pub const EPSILON_CLAMP: f64 = 1.0 - 1e-9;

fn check_horizon(t_horizon: usize) -> Result<f64> {
    if t_horizon < 2 {
        return Err(Error::domain(format!(
            "horizon must be at least 2 (got {t_horizon})"
        )));
    }
    Ok((t_horizon as f64).ln())
}

fn check_positive(name: &str, value: usize) -> Result<()> {
    if value == 0 {
        return Err(Error::domain(format!("{name} must be positive")));
    }
    Ok(())
}

/// The optimal subsampling parameter `(n k² / (4 T ln T))^(1/3)`, unclamped.
pub fn compute_epsilon_star(n: usize, k: usize, t_horizon: usize) -> Result<f64> {
    check_positive("n", n)?;
    check_positive("k", k)?;
    let ln_t = check_horizon(t_horizon)?;
    let (n, k, t) = (n as f64, k as f64, t_horizon as f64);
    Ok((n * k * k / (4.0 * t * ln_t)).cbrt())
}

/// `(kT / (2n√ln T))^(2/3)` before rounding.
pub fn compute_m_raw(n: usize, k: usize, t_horizon: usize) -> Result<f64> {
    check_positive("n", n)?;
    check_positive("k", k)?;
    let ln_t = check_horizon(t_horizon)?;
    let (n, k, t) = (n as f64, k as f64, t_horizon as f64);
    Ok((k * t / (2.0 * n * ln_t.sqrt())).powf(2.0 / 3.0))
}

/// Plays per candidate action, `⌈m_raw⌉` with a floor of one.
pub fn compute_m(n: usize, k: usize, t_horizon: usize) -> Result<usize> {
    let raw = compute_m_raw(n, k, t_horizon)?;
    Ok((raw.ceil() as usize).max(1))
}

/// `β = ln(1/ε) / k`.
pub fn compute_beta(epsilon: f64, k: usize) -> Result<f64> {
    check_positive("k", k)?;
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::domain(format!(
            "epsilon must lie in (0, 1] (got {epsilon})"
        )));
    }
    Ok((1.0 / epsilon).ln() / k as f64)
}

/// Candidate count of phase `phase_index` (1-based): `⌈(n − i + 1)·min{1, β}⌉`,
/// at least 1 and at most `n − i + 1`.
pub fn compute_sample_size(n: usize, phase_index: usize, beta: f64) -> Result<usize> {
    if phase_index == 0 || phase_index > n {
        return Err(Error::domain(format!(
            "phase index {phase_index} outside 1..={n}"
        )));
    }
    if beta.is_nan() || beta < 0.0 {
        return Err(Error::domain(format!(
            "beta must be non-negative (got {beta})"
        )));
    }
    let remaining = n - phase_index + 1;
    let scaled = (remaining as f64 * beta.min(1.0)).ceil() as usize;
    Ok(scaled.clamp(1, remaining))
}

/// The complete schedule governing one run.
#[derive(Debug, Clone, PartialEq)]
pub struct BanditParams {
    n: usize,
    k: usize,
    t_horizon: usize,
    epsilon: f64,
    beta: f64,
    m: usize,
    rad: f64,
}

impl BanditParams {
    /// Builds a schedule with an explicit `ε`. `m` is always the horizon-optimal
    /// value; only `β` and the sample sizes depend on `ε`.
    pub fn new(n: usize, k: usize, t_horizon: usize, epsilon: f64) -> Result<Self> {
        check_positive("n", n)?;
        check_positive("k", k)?;
        if k > n {
            return Err(Error::domain(format!("k = {k} exceeds n = {n}")));
        }
        let ln_t = check_horizon(t_horizon)?;
        let beta = compute_beta(epsilon, k)?;
        let m = compute_m(n, k, t_horizon)?;
        Ok(Self {
            n,
            k,
            t_horizon,
            epsilon,
            beta,
            m,
            rad: (ln_t / m as f64).sqrt(),
        })
    }

    /// Builds the schedule with `ε*`, or with `epsilon_override` when given.
    ///
    /// An optimal `ε*` at or above 1 is clamped to [`EPSILON_CLAMP`]; the
    /// returned warnings say so.
    pub fn derive(
        n: usize,
        k: usize,
        t_horizon: usize,
        epsilon_override: Option<f64>,
    ) -> Result<(Self, Vec<String>)> {
        let mut warnings = Vec::new();
        let epsilon = match epsilon_override {
            Some(eps) => eps,
            None => {
                let eps = compute_epsilon_star(n, k, t_horizon)?;
                if eps >= 1.0 {
                    warnings.push(format!(
                        "epsilon* = {eps:.6} >= 1 for n = {n}, k = {k}, T = {t_horizon}; clamped to {EPSILON_CLAMP}"
                    ));
                    EPSILON_CLAMP
                } else {
                    eps
                }
            }
        };
        Ok((Self::new(n, k, t_horizon, epsilon)?, warnings))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn t_horizon(&self) -> usize {
        self.t_horizon
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn rad(&self) -> f64 {
        self.rad
    }

    /// `s_i` for phase `i` in `1..=k`.
    pub fn sample_size(&self, phase_index: usize) -> usize {
        debug_assert!((1..=self.k).contains(&phase_index));
        compute_sample_size(self.n, phase_index, self.beta)
            .expect("phase index checked against k <= n")
    }

    pub fn sample_sizes(&self) -> Vec<usize> {
        (1..=self.k).map(|i| self.sample_size(i)).collect()
    }

    /// Total exploration length `m · Σ s_i`.
    pub fn exploration_length(&self) -> usize {
        self.m * self.sample_sizes().iter().sum::<usize>()
    }
}

/// Verdict of [`validate_horizon`].
#[derive(Debug, Clone, PartialEq)]
pub struct HorizonReport {
    pub n: usize,
    pub k: usize,
    pub t_horizon: usize,
    /// `n (k + 1) √ln T`, the right-hand side of the horizon condition.
    pub required_horizon: f64,
    pub meets_theorem: bool,
    /// `m · Σ s_i` for the schedule, when one could be derived.
    pub exploration_length: Option<usize>,
    pub fits_budget: bool,
    pub params: Option<BanditParams>,
    pub notes: Vec<String>,
}

impl HorizonReport {
    pub fn is_valid(&self) -> bool {
        self.meets_theorem && self.fits_budget
    }

    /// Checks an already derived schedule (which may carry an overridden `ε`).
    pub fn for_params(params: &BanditParams) -> Self {
        let (n, k, t) = (params.n, params.k, params.t_horizon);
        let required = theorem_requirement(n, k, t);
        let exploration = params.exploration_length();
        Self {
            n,
            k,
            t_horizon: t,
            required_horizon: required,
            meets_theorem: t as f64 >= required,
            exploration_length: Some(exploration),
            fits_budget: exploration <= t,
            params: Some(params.clone()),
            notes: Vec::new(),
        }
    }

    /// One-line description of why the report is invalid, if it is.
    pub fn failure_reason(&self) -> Option<String> {
        if self.is_valid() {
            return None;
        }
        let mut parts = Vec::new();
        if !self.meets_theorem {
            parts.push(format!(
                "T = {} < n(k+1)sqrt(ln T) = {:.1}",
                self.t_horizon, self.required_horizon
            ));
        }
        if !self.fits_budget {
            match self.exploration_length {
                Some(len) => parts.push(format!(
                    "exploration length {len} exceeds T = {}",
                    self.t_horizon
                )),
                None => parts.push("no schedule could be derived".to_string()),
            }
        }
        parts.extend(self.notes.iter().cloned());
        Some(parts.join("; "))
    }
}

fn theorem_requirement(n: usize, k: usize, t_horizon: usize) -> f64 {
    let ln_t = (t_horizon.max(1) as f64).ln();
    n as f64 * (k + 1) as f64 * ln_t.sqrt()
}

/// Checks `T ≥ n(k+1)√ln T` and that the `ε*` schedule's exploration fits in `T`.
pub fn validate_horizon(n: usize, k: usize, t_horizon: usize) -> HorizonReport {
    match BanditParams::derive(n, k, t_horizon, None) {
        Ok((params, warnings)) => {
            let mut report = HorizonReport::for_params(&params);
            report.notes = warnings;
            report
        }
        Err(err) => HorizonReport {
            n,
            k,
            t_horizon,
            required_horizon: theorem_requirement(n, k, t_horizon),
            meets_theorem: false,
            exploration_length: None,
            fits_budget: false,
            params: None,
            notes: vec![err.to_string()],
        },
    }
}

/// Smallest `T ≥ 2` with `T ≥ n(k+1)√ln T`.
pub fn minimal_theorem_horizon(n: usize, k: usize) -> usize {
    let holds = |t: usize| t as f64 >= theorem_requirement(n, k, t);
    // t - c·sqrt(ln t) is increasing for t >= 2, so bisection applies.
    if holds(2) {
        return 2;
    }
    let (mut lo, mut hi) = (2usize, 4usize);
    while !holds(hi) {
        lo = hi;
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if holds(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Smallest `T` for which [`validate_horizon`] passes.
pub fn minimal_valid_horizon(n: usize, k: usize) -> Result<usize> {
    check_positive("n", n)?;
    check_positive("k", k)?;
    if k > n {
        return Err(Error::domain(format!("k = {k} exceeds n = {n}")));
    }
    let start = minimal_theorem_horizon(n, k);
    // The budget check is not monotone in T in general, so scan upwards.
    (start..)
        .take(1 << 26)
        .find(|&t| validate_horizon(n, k, t).is_valid())
        .ok_or_else(|| Error::domain(format!("no valid horizon found for n = {n}, k = {k}")))
}

/// Draws `s` distinct arms uniformly without replacement from `remaining`, in
/// sampling order.
pub fn sample_candidate_set(remaining: &[ArmId], s: usize, rng: &mut SimRng) -> Result<Vec<ArmId>> {
    if s > remaining.len() {
        return Err(Error::SampleTooLarge {
            requested: s,
            available: remaining.len(),
        });
    }
    let mut pool = remaining.to_vec();
    let (picked, _) = pool.partial_shuffle(rng, s);
    Ok(picked.to_vec())
}

/// Bookkeeping for one greedy phase: the committed prefix, this phase's
/// candidates, and running reward sums for each `S^(i-1) ∪ {a}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState {
    pub phase_index: usize,
    pub committed: Vec<ArmId>,
    pub candidates: Vec<ArmId>,
    pub reward_sums: Vec<f64>,
    pub play_counts: Vec<usize>,
    pub m: usize,
}

impl PhaseState {
    pub fn new(
        phase_index: usize,
        committed: Vec<ArmId>,
        candidates: Vec<ArmId>,
        m: usize,
    ) -> Self {
        let len = candidates.len();
        Self {
            phase_index,
            committed,
            candidates,
            reward_sums: vec![0.0; len],
            play_counts: vec![0; len],
            m,
        }
    }

    pub fn sample_size(&self) -> usize {
        self.candidates.len()
    }

    /// Records one reward for the candidate in `slot`.
    pub fn record(&mut self, slot: usize, reward: f64) {
        debug_assert!(self.play_counts[slot] < self.m);
        self.reward_sums[slot] += reward;
        self.play_counts[slot] += 1;
    }

    /// The action `S^(i-1) ∪ {a}` for the candidate in `slot`.
    pub fn action(&self, slot: usize) -> Vec<ArmId> {
        let mut action = Vec::with_capacity(self.committed.len() + 1);
        action.extend_from_slice(&self.committed);
        action.push(self.candidates[slot]);
        action
    }

    pub fn means(&self) -> Vec<f64> {
        self.reward_sums.iter().map(|s| s / self.m as f64).collect()
    }

    pub fn is_complete(&self) -> bool {
        self.play_counts.iter().all(|&c| c == self.m)
    }
}

/// The candidate with the largest empirical mean; ties go to the lowest arm id.
pub fn select_empirical_best(state: &PhaseState) -> Result<ArmId> {
    let mut best: Option<(ArmId, f64)> = None;
    for ((&arm, &sum), &plays) in state
        .candidates
        .iter()
        .zip(&state.reward_sums)
        .zip(&state.play_counts)
    {
        if plays != state.m {
            return Err(Error::PhaseIncomplete {
                arm,
                plays,
                expected: state.m,
            });
        }
        // Equal play counts: comparing sums is comparing means.
        best = match best {
            Some((b_arm, b_sum)) if b_sum > sum || (b_sum == sum && b_arm < arm) => {
                Some((b_arm, b_sum))
            }
            _ => Some((arm, sum)),
        };
    }
    best.map(|(arm, _)| arm)
        .ok_or_else(|| Error::domain("phase has no candidates"))
}
