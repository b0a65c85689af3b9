//! Sufficient statistics shared by every policy.

use serde::{Deserialize, Serialize};

use crate::arm::ArmId;
use crate::decision::{Decision, Provenance};
use crate::error::BanditError;

/// Exploration coefficient of the confidence bonus `c * sqrt(ln T / n)`.
pub const EXPLORATION_COEFFICIENT: f64 = 2.0;

/// `mean + 2*sqrt(ln_horizon / pulls)` for an arm with `pulls >= 1`.
pub fn ucb_value(mean: f64, pulls: u64, ln_horizon: f64) -> f64 {
    mean + EXPLORATION_COEFFICIENT * (ln_horizon / pulls as f64).sqrt()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ArmStats {
    pub pull_count: u64,
    pub reward_sum: f64,
    /// Pulls chosen by the UCB argmax (neither init nor prescheduled).
    pub nonprescheduled_pull_count: u64,
}

impl ArmStats {
    pub fn empirical_mean(&self) -> Option<f64> {
        (self.pull_count > 0).then(|| self.reward_sum / self.pull_count as f64)
    }
}

/// Per-arm pull counts and reward sums plus the global clock.
///
/// `clock` is the number of completed steps; the next decision is for step
/// `clock + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawState", into = "RawState")]
pub struct BanditState {
    clock: u64,
    arms: Vec<ArmStats>,
}

#[derive(Serialize, Deserialize)]
struct RawArm {
    arm: ArmId,
    #[serde(flatten)]
    stats: ArmStats,
}

#[derive(Serialize, Deserialize)]
struct RawState {
    clock: u64,
    arms: Vec<RawArm>,
}

impl TryFrom<RawState> for BanditState {
    type Error = String;

    fn try_from(raw: RawState) -> Result<Self, Self::Error> {
        if raw.arms.is_empty() {
            return Err("state needs at least one arm".into());
        }
        let mut arms = Vec::with_capacity(raw.arms.len());
        for (i, a) in raw.arms.into_iter().enumerate() {
            if a.arm.index() != i {
                return Err(format!("arm {} listed at position {}", a.arm, i + 1));
            }
            let s = a.stats;
            if s.nonprescheduled_pull_count > s.pull_count {
                return Err(format!("arm {}: more UCB pulls than pulls", a.arm));
            }
            if !(0.0..=s.pull_count as f64).contains(&s.reward_sum) {
                return Err(format!("arm {}: reward sum out of range", a.arm));
            }
            arms.push(s);
        }
        let total: u64 = arms.iter().map(|a| a.pull_count).sum();
        if total != raw.clock {
            return Err(format!("pull counts sum to {total}, clock is {}", raw.clock));
        }
        Ok(Self {
            clock: raw.clock,
            arms,
        })
    }
}

impl From<BanditState> for RawState {
    fn from(state: BanditState) -> Self {
        RawState {
            clock: state.clock,
            arms: state
                .arms
                .into_iter()
                .enumerate()
                .map(|(i, stats)| RawArm {
                    arm: ArmId::from_index(i),
                    stats,
                })
                .collect(),
        }
    }
}

impl BanditState {
    /// Fresh state for `num_arms` arms, nothing pulled.
    pub fn new(num_arms: usize) -> Self {
        Self {
            clock: 0,
            arms: vec![ArmStats::default(); num_arms],
        }
    }

    pub fn clock(&self) -> u64 {
        self.clock
    }

    pub fn num_arms(&self) -> usize {
        self.arms.len()
    }

    pub fn arm(&self, arm: ArmId) -> Result<&ArmStats, BanditError> {
        self.arms.get(arm.index()).ok_or(BanditError::ArmOutOfRange {
            arm,
            num_arms: self.arms.len(),
        })
    }

    pub fn arms(&self) -> &[ArmStats] {
        &self.arms
    }

    pub fn pull_counts(&self) -> Vec<u64> {
        self.arms.iter().map(|a| a.pull_count).collect()
    }

    pub fn nonprescheduled_pull_counts(&self) -> Vec<u64> {
        self.arms.iter().map(|a| a.nonprescheduled_pull_count).collect()
    }

    pub fn empirical_mean(&self, arm: ArmId) -> Result<f64, BanditError> {
        self.arm(arm)?
            .empirical_mean()
            .ok_or(BanditError::ArmNeverPulled(arm))
    }

    /// `mean(arm) + 2*sqrt(ln T / n(arm))`.
    pub fn ucb_index(&self, arm: ArmId, horizon: u64) -> Result<f64, BanditError> {
        let stats = self.arm(arm)?;
        let mean = stats
            .empirical_mean()
            .ok_or(BanditError::ArmNeverPulled(arm))?;
        Ok(ucb_value(mean, stats.pull_count, (horizon as f64).ln()))
    }

    /// Arm with the largest UCB index; ties go to the lowest arm.
    pub fn ucb_argmax(&self, horizon: u64) -> Result<ArmId, BanditError> {
        let mut best = ArmId::from_index(0);
        let mut best_index = self.ucb_index(best, horizon)?;
        for i in 1..self.arms.len() {
            let arm = ArmId::from_index(i);
            let index = self.ucb_index(arm, horizon)?;
            if index > best_index {
                best = arm;
                best_index = index;
            }
        }
        Ok(best)
    }

    /// Records the observed reward for `decision` and advances the clock.
    pub fn update(&mut self, decision: &Decision, reward: f64) -> Result<(), BanditError> {
        if !(0.0..=1.0).contains(&reward) {
            return Err(BanditError::RewardOutOfRange(reward));
        }
        let num_arms = self.arms.len();
        let stats = self
            .arms
            .get_mut(decision.arm.index())
            .ok_or(BanditError::ArmOutOfRange {
                arm: decision.arm,
                num_arms,
            })?;
        stats.pull_count += 1;
        stats.reward_sum += reward;
        if decision.provenance == Provenance::UcbArgmax {
            stats.nonprescheduled_pull_count += 1;
        }
        self.clock += 1;
        Ok(())
    }
}
