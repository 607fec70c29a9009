//! Probabilistic coverage: arm `a` covers element `u` independently with
//! probability `p[a][u]`, and the reward is the covered fraction of the
//! universe. The expectation has a closed form, which makes this the exact
//! oracle used to check the learners.
//!
//! # File format
//!
//! ```text
//! # comments start with '#'
//! format = coverage/1
//! arms = 2
//! universe = 3
//! p0 = 0.5 0 0.25
//! p1 = 0.125 1 0
//! ```
//!
//! Row `pA` lists arm `A`'s probabilities for elements `0..universe`.
//! Values are written with the shortest representation that parses back
//! to the same `f64`.

use std::fmt::Write as _;
use std::io::BufRead;

use rand::Rng;

use super::{Environment, Estimate, SetOracle};
use crate::{ArmId, Error, Result, SimRng};

pub const FORMAT_TAG: &str = "coverage/1";

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageInstance {
    arms: usize,
    universe: usize,
    /// Row-major `arms × universe`.
    probs: Vec<f64>,
}

/// Settings for [`CoverageInstance::generate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageParams {
    pub arms: usize,
    pub universe: usize,
    /// Upper end of the uniform draw for each nonzero entry.
    pub p_max: f64,
    /// Probability that an entry is nonzero.
    pub density: f64,
}

impl CoverageInstance {
    pub fn new(arms: usize, universe: usize, probs: Vec<f64>) -> Result<Self> {
        if arms == 0 || universe == 0 {
            return Err(Error::domain(
                "coverage instance needs arms >= 1 and universe >= 1",
            ));
        }
        if probs.len() != arms * universe {
            return Err(Error::domain(format!(
                "expected {} probabilities, got {}",
                arms * universe,
                probs.len()
            )));
        }
        if let Some(bad) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::domain(format!("probability {bad} outside [0, 1]")));
        }
        Ok(Self {
            arms,
            universe,
            probs,
        })
    }

    /// Random instance: each entry is nonzero with probability `density`, and
    /// nonzero entries are uniform on `[0, p_max]`.
    pub fn generate(params: CoverageParams, rng: &mut SimRng) -> Result<Self> {
        let CoverageParams {
            arms,
            universe,
            p_max,
            density,
        } = params;
        if !(0.0..=1.0).contains(&p_max) || !(0.0..=1.0).contains(&density) {
            return Err(Error::domain("p_max and density must lie in [0, 1]"));
        }
        let probs = (0..arms * universe)
            .map(|_| {
                if rng.gen::<f64>() < density {
                    rng.gen::<f64>() * p_max
                } else {
                    0.0
                }
            })
            .collect();
        Self::new(arms, universe, probs)
    }

    /// Noiseless modular instance: arm `a` alone covers `sizes[a]` elements
    /// with certainty, so `f(S) = Σ_{a∈S} sizes[a] / Σ sizes`.
    pub fn disjoint_blocks(sizes: &[usize]) -> Result<Self> {
        let universe: usize = sizes.iter().sum();
        let mut probs = vec![0.0; sizes.len() * universe];
        let mut offset = 0;
        for (arm, &size) in sizes.iter().enumerate() {
            for u in offset..offset + size {
                probs[arm * universe + u] = 1.0;
            }
            offset += size;
        }
        Self::new(sizes.len(), universe, probs)
    }

    pub fn arms(&self) -> usize {
        self.arms
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn prob(&self, arm: ArmId, element: usize) -> f64 {
        self.probs[arm * self.universe + element]
    }

    fn row(&self, arm: ArmId) -> &[f64] {
        &self.probs[arm * self.universe..(arm + 1) * self.universe]
    }

    /// `Π_{a∈action} (1 − p[a][u])` for every element, each arm counted once.
    fn miss_probabilities(&self, action: &[ArmId]) -> Result<Vec<f64>> {
        let mut miss = vec![1.0; self.universe];
        for (j, &arm) in action.iter().enumerate() {
            if arm >= self.arms {
                return Err(Error::UnknownArm {
                    arm,
                    arm_count: self.arms,
                });
            }
            if action[..j].contains(&arm) {
                continue;
            }
            for (q, &p) in miss.iter_mut().zip(self.row(arm)) {
                *q *= 1.0 - p;
            }
        }
        Ok(miss)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# probabilistic coverage instance");
        let _ = writeln!(out, "format = {FORMAT_TAG}");
        let _ = writeln!(out, "arms = {}", self.arms);
        let _ = writeln!(out, "universe = {}", self.universe);
        for arm in 0..self.arms {
            let row: Vec<String> = self.row(arm).iter().map(|p| format!("{p:?}")).collect();
            let _ = writeln!(out, "p{arm} = {}", row.join(" "));
        }
        out
    }

    pub fn from_reader<R: BufRead>(reader: R) -> Result<Self> {
        let mut format = None;
        let mut arms: Option<usize> = None;
        let mut universe: Option<usize> = None;
        let mut rows: Vec<Option<Vec<f64>>> = Vec::new();
        let mut last_line = 0;

        for (idx, line) in reader.lines().enumerate() {
            let line_no = idx + 1;
            last_line = line_no;
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let err = |message: String| Error::Parse {
                line: line_no,
                message,
            };
            let (key, value) = trimmed
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| err("expected `key = value`".to_string()))?;
            let parse_count = |v: &str| {
                v.parse::<usize>()
                    .map_err(|_| err(format!("invalid count {v:?} for {key}")))
            };
            match key {
                "format" => {
                    if value != FORMAT_TAG {
                        return Err(err(format!("unsupported format {value:?}")));
                    }
                    format = Some(());
                }
                "arms" => {
                    let n = parse_count(value)?;
                    rows = vec![None; n];
                    arms = Some(n);
                }
                "universe" => universe = Some(parse_count(value)?),
                _ if key.starts_with('p') => {
                    let (Some(n), Some(u)) = (arms, universe) else {
                        return Err(err("probability row before arms/universe".to_string()));
                    };
                    let arm = key[1..]
                        .parse::<usize>()
                        .ok()
                        .filter(|&a| a < n)
                        .ok_or_else(|| err(format!("invalid row key {key:?}")))?;
                    if rows[arm].is_some() {
                        return Err(err(format!("duplicate row {key:?}")));
                    }
                    let row = value
                        .split_whitespace()
                        .map(|t| {
                            t.parse::<f64>()
                                .ok()
                                .filter(|p| (0.0..=1.0).contains(p))
                                .ok_or_else(|| err(format!("invalid probability {t:?}")))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    if row.len() != u {
                        return Err(err(format!(
                            "row {key} has {} entries, expected {u}",
                            row.len()
                        )));
                    }
                    rows[arm] = Some(row);
                }
                _ => return Err(err(format!("unknown key {key:?}"))),
            }
        }
        let missing = |what: &str| Error::Parse {
            line: last_line,
            message: format!("missing {what}"),
        };
        format.ok_or_else(|| missing("format"))?;
        let arms = arms.ok_or_else(|| missing("arms"))?;
        let universe = universe.ok_or_else(|| missing("universe"))?;
        let mut probs = Vec::with_capacity(arms * universe);
        for (arm, row) in rows.into_iter().enumerate() {
            probs.extend(row.ok_or_else(|| missing(&format!("row p{arm}")))?);
        }
        Self::new(arms, universe, probs)
    }
}

/// Exact expected covered fraction `(1/|U|) Σ_u (1 − Π_{a∈S} (1 − p[a][u]))`.
pub fn coverage_expected(instance: &CoverageInstance, action: &[ArmId]) -> Result<f64> {
    let miss = instance.miss_probabilities(action)?;
    Ok(miss.iter().map(|q| 1.0 - q).sum::<f64>() / instance.universe as f64)
}

/// One realisation of the covered fraction.
///
/// Element `u` is covered with probability `1 − Π (1 − p[a][u])`, which is the
/// law of "some arm's independent coin covers it"; one uniform is drawn per
/// element whose coverage is not already certain either way.
pub fn coverage_sample(
    instance: &CoverageInstance,
    action: &[ArmId],
    rng: &mut SimRng,
) -> Result<f64> {
    if action.is_empty() {
        return Ok(0.0);
    }
    let miss = instance.miss_probabilities(action)?;
    let covered = miss
        .iter()
        .filter(|&&q| q <= 0.0 || (q < 1.0 && rng.gen::<f64>() >= q))
        .count();
    Ok(covered as f64 / instance.universe as f64)
}

impl Environment for CoverageInstance {
    fn arm_count(&self) -> usize {
        self.arms
    }

    fn sample(&self, action: &[ArmId], rng: &mut SimRng) -> Result<f64> {
        coverage_sample(self, action, rng)
    }

    fn expected(&self, action: &[ArmId]) -> Result<Estimate> {
        coverage_expected(self, action).map(Estimate::exact)
    }

    fn has_exact_oracle(&self) -> bool {
        true
    }
}

impl SetOracle for CoverageInstance {
    fn arm_count(&self) -> usize {
        self.arms
    }

    fn value(&self, set: &[ArmId]) -> Result<f64> {
        coverage_expected(self, set)
    }
}
