use rayon::prelude::*;

use crate::env::SetOracle;
use crate::schedule::{compute_beta, compute_sample_size, sample_candidate_set};
use crate::{ArmId, Error, Result, SimRng};

/// Largest ground set [`brute_force_opt`] accepts.
pub const BRUTE_FORCE_MAX_ARMS: usize = 20;
/// Largest number of subsets [`brute_force_opt`] will evaluate.
pub const BRUTE_FORCE_MAX_SUBSETS: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct OfflineResult {
    /// Selected arms; in selection order for the greedy variants, ascending for brute force.
    pub selected: Vec<ArmId>,
    pub value: f64,
    /// Number of oracle calls made.
    pub evaluations: usize,
}

/// Evaluates `base ∪ {a}` for every candidate and returns the best, ties to
/// the lowest arm id.
fn best_extension<O: SetOracle + ?Sized>(
    oracle: &O,
    base: &[ArmId],
    candidates: &[ArmId],
) -> Result<(ArmId, f64)> {
    let values = candidates
        .par_iter()
        .map(|&a| {
            let mut set = Vec::with_capacity(base.len() + 1);
            set.extend_from_slice(base);
            set.push(a);
            oracle.value(&set)
        })
        .collect::<Result<Vec<f64>>>()?;
    candidates
        .iter()
        .zip(values)
        .fold(None, |best: Option<(ArmId, f64)>, (&a, v)| match best {
            Some((b, bv)) if bv > v || (bv == v && b < a) => Some((b, bv)),
            _ => Some((a, v)),
        })
        .ok_or_else(|| Error::domain("no candidates to extend with"))
}

fn check_k(k: usize, n: usize) -> Result<()> {
    if k > n {
        return Err(Error::domain(format!("k = {k} exceeds arm count {n}")));
    }
    Ok(())
}

/// Classic greedy: `k` passes, each adding the remaining arm with the largest
/// marginal gain. Makes `Σ_{i=1..k} (n − i + 1)` oracle calls.
pub fn offline_greedy<O: SetOracle + ?Sized>(oracle: &O, k: usize) -> Result<OfflineResult> {
    let n = oracle.arm_count();
    check_k(k, n)?;
    if k == 0 {
        return Ok(OfflineResult {
            selected: Vec::new(),
            value: oracle.value(&[])?,
            evaluations: 1,
        });
    }
    let mut selected = Vec::with_capacity(k);
    let mut remaining: Vec<ArmId> = (0..n).collect();
    let mut value = 0.0;
    let mut evaluations = 0;
    for _ in 0..k {
        let (arm, v) = best_extension(oracle, &selected, &remaining)?;
        evaluations += remaining.len();
        selected.push(arm);
        remaining.retain(|&a| a != arm);
        value = v;
    }
    Ok(OfflineResult {
        selected,
        value,
        evaluations,
    })
}

/// Stochastic greedy: phase `i` only considers a uniform random subset of
/// `⌈(n − i + 1)·min{1, ln(1/ε)/k}⌉` remaining arms.
pub fn offline_stochastic_greedy<O: SetOracle + ?Sized>(
    oracle: &O,
    k: usize,
    epsilon: f64,
    rng: &mut SimRng,
) -> Result<OfflineResult> {
    let n = oracle.arm_count();
    check_k(k, n)?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::domain(format!(
            "epsilon must lie in (0, 1) (got {epsilon})"
        )));
    }
    if k == 0 {
        return offline_greedy(oracle, 0);
    }
    let beta = compute_beta(epsilon, k)?;
    let mut selected = Vec::with_capacity(k);
    let mut remaining: Vec<ArmId> = (0..n).collect();
    let mut value = 0.0;
    let mut evaluations = 0;
    for phase in 1..=k {
        let s = compute_sample_size(n, phase, beta)?;
        let candidates = sample_candidate_set(&remaining, s, rng)?;
        let (arm, v) = best_extension(oracle, &selected, &candidates)?;
        evaluations += candidates.len();
        selected.push(arm);
        remaining.retain(|&a| a != arm);
        value = v;
    }
    Ok(OfflineResult {
        selected,
        value,
        evaluations,
    })
}

fn binomial(n: u64, r: u64) -> u64 {
    (0..r).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Exact maximiser of `f` over all subsets of size at most `k`; ties go to
/// the lexicographically smallest sorted set.
pub fn brute_force_opt<O: SetOracle + ?Sized>(oracle: &O, k: usize) -> Result<OfflineResult> {
    let n = oracle.arm_count();
    check_k(k, n)?;
    if n > BRUTE_FORCE_MAX_ARMS {
        return Err(Error::BudgetExceeded(format!(
            "brute force supports at most {BRUTE_FORCE_MAX_ARMS} arms (got {n})"
        )));
    }
    let subsets: u64 = (0..=k as u64).map(|j| binomial(n as u64, j)).sum();
    if subsets > BRUTE_FORCE_MAX_SUBSETS {
        return Err(Error::BudgetExceeded(format!(
            "{subsets} subsets of size <= {k} exceed the limit of {BRUTE_FORCE_MAX_SUBSETS}"
        )));
    }

    let mut best: Vec<ArmId> = Vec::new();
    let mut best_value = oracle.value(&[])?;
    let mut evaluations = 1;
    for size in 1..=k {
        // Lexicographic enumeration of size-`size` combinations.
        let mut combo: Vec<ArmId> = (0..size).collect();
        loop {
            let v = oracle.value(&combo)?;
            evaluations += 1;
            if v > best_value || (v == best_value && combo < best) {
                best_value = v;
                best.clone_from(&combo);
            }
            let Some(pos) = (0..size).rev().find(|&i| combo[i] != i + n - size) else {
                break;
            };
            combo[pos] += 1;
            for j in pos + 1..size {
                combo[j] = combo[j - 1] + 1;
            }
        }
    }
    Ok(OfflineResult {
        selected: best,
        value: best_value,
        evaluations,
    })
}
