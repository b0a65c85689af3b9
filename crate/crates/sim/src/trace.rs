use fairbandit_core::{Decision, PolicyKind, SlotClass};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    /// 1-based step index.
    pub t: u64,
    pub decision: Decision,
    pub reward: f64,
    pub slot_class: SlotClass,
}

/// Full per-step record of one simulated episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub policy: PolicyKind,
    pub num_arms: usize,
    pub steps: Vec<StepRecord>,
    /// Final `n_T(i)`.
    pub pull_counts: Vec<u64>,
    /// Final `m_T(i)`.
    pub nonprescheduled_pull_counts: Vec<u64>,
}

impl RunTrace {
    pub fn horizon(&self) -> u64 {
        self.steps.len() as u64
    }

    /// Pulled arms, 1-based.
    pub fn arm_numbers(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.decision.arm.number()).collect()
    }

    /// `n_t(i)` after each step: row `t - 1` holds the counts after step `t`.
    pub fn cumulative_pulls(&self) -> Vec<Vec<u64>> {
        let mut counts = vec![0u64; self.num_arms];
        self.steps
            .iter()
            .map(|s| {
                counts[s.decision.arm.index()] += 1;
                counts.clone()
            })
            .collect()
    }
}
