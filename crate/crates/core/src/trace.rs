//! Per-step record of an online run.

use crate::schedule::BanditParams;
use crate::ArmId;

/// Outcome of one completed greedy phase.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseRecord {
    /// Candidates in sampling order.
    pub candidates: Vec<ArmId>,
    /// Empirical mean of `S^(i-1) ∪ {a}` for each candidate.
    pub means: Vec<f64>,
    pub chosen: ArmId,
}

/// One restart of the learner. Single runs have exactly one epoch; the
/// anytime wrapper produces one per doubling window.
#[derive(Debug, Clone, PartialEq)]
pub struct Epoch {
    /// Number of steps played before this epoch began.
    pub start: usize,
    /// Steps actually played in this epoch (shorter than the horizon when truncated).
    pub len: usize,
    /// Schedule the epoch was run with; `None` for baselines without one.
    pub params: Option<BanditParams>,
    /// `T_1..T_i` for every completed phase, counted from the epoch start.
    pub phase_ends: Vec<usize>,
    pub phases: Vec<PhaseRecord>,
    /// `a_1, a_2, ...` in selection order.
    pub committed_arms: Vec<ArmId>,
    /// `m · Σ s_i`; may exceed `len` when the horizon cuts exploration short.
    pub scheduled_exploration: usize,
}

impl Epoch {
    pub fn exploration_complete(&self) -> bool {
        self.scheduled_exploration <= self.len
    }

    /// Phase number of epoch-relative step `t` (0-based): `1..=k` while
    /// exploring, `k + 1` while exploiting.
    pub fn phase_of(&self, t: usize) -> usize {
        match &self.params {
            None => 0,
            Some(p) => {
                let mut end = 0;
                for i in 1..=p.k() {
                    end += p.m() * p.sample_size(i);
                    if t < end {
                        return i;
                    }
                }
                p.k() + 1
            }
        }
    }
}

/// Actions and rewards of a full run.
///
/// Actions are interned: `steps[t]` indexes `action_table`, which keeps each
/// distinct action once in first-play order.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub epochs: Vec<Epoch>,
    pub action_table: Vec<Vec<ArmId>>,
    pub steps: Vec<u32>,
    pub rewards: Vec<f64>,
    /// Set when the horizon check was bypassed.
    pub forced: bool,
    pub warnings: Vec<String>,
}

impl RunTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Action played at 0-based step `t`.
    pub fn action(&self, t: usize) -> &[ArmId] {
        &self.action_table[self.steps[t] as usize]
    }

    pub fn actions(&self) -> impl Iterator<Item = &[ArmId]> + '_ {
        self.steps
            .iter()
            .map(|&id| self.action_table[id as usize].as_slice())
    }

    /// Schedule of the first epoch.
    pub fn params(&self) -> Option<&BanditParams> {
        self.epochs.first().and_then(|e| e.params.as_ref())
    }

    pub fn phase_ends(&self) -> &[usize] {
        self.epochs.first().map_or(&[], |e| &e.phase_ends)
    }

    pub fn committed_arms(&self) -> &[ArmId] {
        self.epochs.first().map_or(&[], |e| &e.committed_arms)
    }

    /// Step at which the first epoch stops exploring, capped at its length.
    pub fn exploration_end(&self) -> usize {
        self.epochs
            .first()
            .map_or(0, |e| e.scheduled_exploration.min(e.len))
    }

    /// Uncapped exploration length of the first epoch's schedule.
    pub fn scheduled_exploration(&self) -> usize {
        self.epochs.first().map_or(0, |e| e.scheduled_exploration)
    }

    pub fn cumulative_reward(&self) -> f64 {
        self.rewards.iter().sum()
    }

    /// Mean reward over the exploitation steps of the first epoch, if any.
    pub fn exploit_mean_reward(&self) -> Option<f64> {
        let epoch = self.epochs.first()?;
        let from = epoch.start + epoch.scheduled_exploration;
        let to = epoch.start + epoch.len;
        (from < to).then(|| self.rewards[from..to].iter().sum::<f64>() / (to - from) as f64)
    }

    /// `(epoch index, phase)` of 0-based step `t`.
    pub fn phase_of(&self, t: usize) -> (usize, usize) {
        let idx = self
            .epochs
            .iter()
            .rposition(|e| e.start <= t)
            .expect("step within trace");
        (idx, self.epochs[idx].phase_of(t - self.epochs[idx].start))
    }

    /// Exact equality including the bit patterns of every reward.
    pub fn bitwise_eq(&self, other: &Self) -> bool {
        self == other
            && self
                .rewards
                .iter()
                .zip(&other.rewards)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}
