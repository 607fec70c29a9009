//! Brute-force verification of monotonicity and diminishing returns.

use super::SetOracle;
use crate::{ArmId, Error, Result};

pub const MAX_CHECK_ARMS: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// `f(smaller) > f(larger)` although `smaller ⊆ larger`.
    Monotonicity {
        smaller: Vec<ArmId>,
        larger: Vec<ArmId>,
        gap: f64,
    },
    /// `f(A ∪ {x}) − f(A) < f(B ∪ {x}) − f(B)` for `A ⊆ B`, `x ∉ B`.
    DiminishingReturns {
        a: Vec<ArmId>,
        b: Vec<ArmId>,
        x: ArmId,
        gap: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubmodularityReport {
    pub arm_count: usize,
    pub tolerance: f64,
    pub pairs_checked: u64,
    pub first_violation: Option<Violation>,
}

impl SubmodularityReport {
    pub fn passed(&self) -> bool {
        self.first_violation.is_none()
    }
}

fn members(mask: u32) -> Vec<ArmId> {
    (0..32).filter(|i| mask >> i & 1 == 1).collect()
}

/// Checks every `A ⊆ B ⊆ Ω` for monotonicity and every `A ⊆ B ⊂ Ω`, `x ∉ B`
/// for diminishing returns, allowing violations up to `tolerance`.
pub fn check_monotone_submodular<O: SetOracle + ?Sized>(
    oracle: &O,
    tolerance: f64,
) -> Result<SubmodularityReport> {
    let n = oracle.arm_count();
    if n > MAX_CHECK_ARMS {
        return Err(Error::BudgetExceeded(format!(
            "submodularity check enumerates 3^n pairs; n = {n} exceeds {MAX_CHECK_ARMS}"
        )));
    }
    let full: u32 = (1u32 << n) - 1;
    let values = (0..=full)
        .map(|mask| oracle.value(&members(mask)))
        .collect::<Result<Vec<_>>>()?;

    let mut report = SubmodularityReport {
        arm_count: n,
        tolerance,
        pairs_checked: 0,
        first_violation: None,
    };
    for b in 0..=full {
        // Enumerate subsets a of b, including b itself and the empty set.
        let mut a = b;
        loop {
            report.pairs_checked += 1;
            let gap = values[a as usize] - values[b as usize];
            if gap > tolerance {
                report.first_violation = Some(Violation::Monotonicity {
                    smaller: members(a),
                    larger: members(b),
                    gap,
                });
                return Ok(report);
            }
            for x in (0..n).filter(|&x| b >> x & 1 == 0) {
                let bit = 1u32 << x;
                let gain_a = values[(a | bit) as usize] - values[a as usize];
                let gain_b = values[(b | bit) as usize] - values[b as usize];
                if gain_b - gain_a > tolerance {
                    report.first_violation = Some(Violation::DiminishingReturns {
                        a: members(a),
                        b: members(b),
                        x,
                        gap: gain_b - gain_a,
                    });
                    return Ok(report);
                }
            }
            if a == 0 {
                break;
            }
            a = (a - 1) & b;
        }
    }
    Ok(report)
}
