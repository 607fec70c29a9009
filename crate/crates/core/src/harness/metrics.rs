use std::io::Write;

use super::fmt::{fmt_float, fmt_opt};
use crate::env::Estimate;
use crate::{Error, Result, RunTrace};

/// Per-run result row.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub method: String,
    /// The `ε` that set the schedule; `None` for the random baseline.
    pub epsilon: Option<f64>,
    pub k: usize,
    pub horizon: usize,
    pub rep: usize,
    pub seed: u64,
    pub cum_reward: f64,
    /// `horizon·f_ref − cum_reward`; negative when the learner beats the reference.
    pub regret: f64,
    /// `horizon·f_ref`.
    pub regret_ref: f64,
    /// `horizon·stderr(f_ref)`; zero for exact oracles.
    pub regret_ref_stderr: f64,
    pub exploration_end: usize,
    pub exploit_mean_reward: Option<f64>,
    pub wall_ms: Option<f64>,
}

pub const SUMMARY_COLUMNS: [&str; 13] = [
    "method",
    "epsilon",
    "k",
    "horizon",
    "rep",
    "seed",
    "cum_reward",
    "regret",
    "regret_ref",
    "regret_ref_stderr",
    "exploration_end",
    "exploit_mean_reward",
    "wall_ms",
];

pub const TRACE_COLUMNS: [&str; 5] = ["t", "phase", "action_size", "reward", "cum_reward"];

impl RunSummary {
    #[allow(clippy::too_many_arguments)]
    pub fn from_trace(
        method: &str,
        k: usize,
        rep: usize,
        seed: u64,
        trace: &RunTrace,
        reference: Estimate,
        wall_ms: Option<f64>,
    ) -> Self {
        let horizon = trace.len();
        let cum_reward = trace.cumulative_reward();
        let regret_ref = horizon as f64 * reference.mean;
        Self {
            method: method.to_string(),
            epsilon: trace.params().map(|p| p.epsilon()),
            k,
            horizon,
            rep,
            seed,
            cum_reward,
            regret: regret_ref - cum_reward,
            regret_ref,
            regret_ref_stderr: horizon as f64 * reference.std_error,
            exploration_end: trace.exploration_end(),
            exploit_mean_reward: trace.exploit_mean_reward(),
            wall_ms,
        }
    }

    /// Fields in [`SUMMARY_COLUMNS`] order, formatted for CSV.
    pub fn record(&self) -> Vec<String> {
        vec![
            self.method.clone(),
            fmt_opt(self.epsilon),
            self.k.to_string(),
            self.horizon.to_string(),
            self.rep.to_string(),
            self.seed.to_string(),
            fmt_float(self.cum_reward),
            fmt_float(self.regret),
            fmt_float(self.regret_ref),
            fmt_float(self.regret_ref_stderr),
            self.exploration_end.to_string(),
            fmt_opt(self.exploit_mean_reward),
            fmt_opt(self.wall_ms),
        ]
    }

    /// The record as one comma-separated line.
    pub fn line(&self) -> String {
        self.record().join(",")
    }
}

pub fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

pub fn write_summaries<W: Write>(out: W, rows: &[RunSummary]) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(SUMMARY_COLUMNS)?;
    for row in rows {
        w.write_record(row.record())?;
    }
    w.flush()?;
    Ok(())
}

/// Writes one row per step; `t` is 1-based and `phase` is the phase within
/// the step's epoch (`k + 1` while exploiting, `0` without a schedule).
pub fn write_trace<W: Write>(out: W, trace: &RunTrace) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(TRACE_COLUMNS)?;
    let mut cum = 0.0;
    for (t, &reward) in trace.rewards.iter().enumerate() {
        cum += reward;
        let (_, phase) = trace.phase_of(t);
        w.write_record([
            (t + 1).to_string(),
            phase.to_string(),
            trace.action(t).len().to_string(),
            fmt_float(reward),
            fmt_float(cum),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Element `t` (1-based) is `t·f_ref − Σ_{τ≤t} reward_τ`.
pub fn cumulative_regret_series(trace: &RunTrace, f_ref: f64) -> Result<Vec<f64>> {
    regret_series(&trace.rewards, f_ref)
}

/// [`cumulative_regret_series`] over a bare reward sequence.
pub fn regret_series(rewards: &[f64], f_ref: f64) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&f_ref) {
        return Err(Error::domain(format!(
            "reference value {f_ref} is outside [0, 1]"
        )));
    }
    let mut cum = 0.0;
    Ok(rewards
        .iter()
        .enumerate()
        .map(|(t, r)| {
            cum += r;
            (t + 1) as f64 * f_ref - cum
        })
        .collect())
}

/// Trailing mean over the last `min(t, window)` values.
pub fn moving_average(series: &[f64], window: usize) -> Result<Vec<f64>> {
    if window == 0 {
        return Err(Error::domain("moving-average window must be positive"));
    }
    Ok((0..series.len())
        .map(|t| {
            let slice = &series[(t + 1).saturating_sub(window)..=t];
            let mean = slice.iter().sum::<f64>() / slice.len() as f64;
            // keep rounding from escaping the window's range
            let (lo, hi) = slice
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                    (lo.min(v), hi.max(v))
                });
            mean.clamp(lo, hi)
        })
        .collect())
}

/// Running mean and sample standard deviation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MeanStd {
    pub count: usize,
    pub mean: f64,
    m2: f64,
}

impl MeanStd {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    /// `(n − 1)`-denominator standard deviation; zero for a single value.
    pub fn std(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).max(0.0).sqrt()
        }
    }
}

impl FromIterator<f64> for MeanStd {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::default();
        iter.into_iter().for_each(|x| acc.push(x));
        acc
    }
}

/// Pointwise mean and standard deviation of equal-length series.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesStats {
    pub runs: usize,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

pub fn aggregate_series(series: &[Vec<f64>]) -> Result<SeriesStats> {
    let first = series
        .first()
        .ok_or_else(|| Error::domain("cannot aggregate an empty group"))?;
    let len = first.len();
    if let Some(bad) = series.iter().find(|s| s.len() != len) {
        return Err(Error::LengthMismatch {
            expected: len,
            found: bad.len(),
        });
    }
    let stats: Vec<MeanStd> = (0..len)
        .map(|t| series.iter().map(|s| s[t]).collect())
        .collect();
    Ok(SeriesStats {
        runs: series.len(),
        mean: stats.iter().map(|s| s.mean).collect(),
        std: stats.iter().map(MeanStd::std).collect(),
    })
}

/// Regret at the horizon, aggregated over the runs of one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupStats {
    pub method: String,
    pub epsilon: Option<f64>,
    pub k: usize,
    pub horizon: usize,
    pub runs: usize,
    pub regret_mean: f64,
    pub regret_std: f64,
    pub exploration_end_mean: f64,
}

/// Groups summaries by `(method, ε, k, horizon)` in first-appearance order.
pub fn aggregate_runs(summaries: &[RunSummary]) -> Vec<GroupStats> {
    type Key = (String, Option<u64>, usize, usize);
    let mut groups: Vec<(Key, MeanStd, MeanStd)> = Vec::new();
    for s in summaries {
        let key = (
            s.method.clone(),
            s.epsilon.map(f64::to_bits),
            s.k,
            s.horizon,
        );
        let idx = match groups.iter().position(|(g, _, _)| *g == key) {
            Some(i) => i,
            None => {
                groups.push((key, MeanStd::default(), MeanStd::default()));
                groups.len() - 1
            }
        };
        groups[idx].1.push(s.regret);
        groups[idx].2.push(s.exploration_end as f64);
    }
    groups
        .into_iter()
        .map(|((method, eps, k, horizon), regret, explore)| GroupStats {
            method,
            epsilon: eps.map(f64::from_bits),
            k,
            horizon,
            runs: regret.count,
            regret_mean: regret.mean,
            regret_std: regret.std(),
            exploration_end_mean: explore.mean,
        })
        .collect()
}
