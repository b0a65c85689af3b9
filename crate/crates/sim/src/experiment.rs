//! Seeded episodes.
//!
//! Episode `e` of an experiment draws rewards from one ChaCha stream and
//! policy randomness from another, both keyed by the master seed mixed with
//! the environment seed. Streams never depend on scheduling, so parallel
//! and sequential execution give the same traces.

use fairbandit_core::{
    mix_seeds, Allocator, Channel, EnvSpec, FairnessConfig, PolicyKind, Schedule, StreamRng,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aggregate::{Accumulator, AggregateStats};
use crate::error::HarnessError;
use crate::trace::{RunTrace, StepRecord};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub policy: PolicyKind,
    pub fairness: FairnessConfig,
    pub env: EnvSpec,
    pub runs: u64,
    pub master_seed: u64,
    /// Strict policy only; `None` means the default evenly spaced schedule.
    pub schedule: Option<Schedule>,
}

impl ExperimentConfig {
    pub fn new(
        policy: PolicyKind,
        fairness: FairnessConfig,
        env: EnvSpec,
        runs: u64,
        master_seed: u64,
    ) -> Result<Self, HarnessError> {
        let cfg = Self {
            policy,
            fairness,
            env,
            runs,
            master_seed,
            schedule: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_schedule(mut self, schedule: Schedule) -> Result<Self, HarnessError> {
        self.schedule = Some(schedule);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.fairness.num_arms() != self.env.num_arms() {
            return Err(HarnessError::ArmCountMismatch {
                fairness: self.fairness.num_arms(),
                env: self.env.num_arms(),
            });
        }
        if self.runs == 0 {
            return Err(HarnessError::ZeroRuns);
        }
        // surfaces schedule/config mismatches before any episode runs
        self.allocator(0)?;
        Ok(())
    }

    fn stream_key(&self) -> u64 {
        mix_seeds(self.master_seed, self.env.seed)
    }

    fn allocator(&self, episode: u64) -> Result<Allocator, HarnessError> {
        let rng = StreamRng::for_episode(self.stream_key(), episode, Channel::Policy);
        Ok(Allocator::new(
            self.policy,
            self.fairness,
            self.schedule.clone(),
            rng,
        )?)
    }
}

/// Simulates one full horizon.
pub fn run_episode(cfg: &ExperimentConfig, episode: u64) -> Result<RunTrace, HarnessError> {
    let mut allocator = cfg.allocator(episode)?;
    let mut env_rng = StreamRng::for_episode(cfg.stream_key(), episode, Channel::Environment);
    let horizon = cfg.fairness.horizon();
    let mut steps = Vec::with_capacity(horizon as usize);
    while !allocator.is_finished() {
        let decision = allocator.decide()?;
        let reward = cfg.env.sample_reward(decision.arm, &mut env_rng)?;
        allocator.observe(&decision, reward)?;
        steps.push(StepRecord {
            t: allocator.state().clock(),
            slot_class: decision.provenance.slot_class(),
            decision,
            reward,
        });
    }
    Ok(RunTrace {
        policy: cfg.policy,
        num_arms: cfg.fairness.num_arms(),
        steps,
        pull_counts: allocator.state().pull_counts(),
        nonprescheduled_pull_counts: allocator.state().nonprescheduled_pull_counts(),
    })
}

const CHUNK: u64 = 64;

/// Runs all episodes (in parallel) and folds them in episode order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<AggregateStats, HarnessError> {
    cfg.validate()?;
    let mut acc = Accumulator::new(cfg.fairness.num_arms(), cfg.fairness.horizon());
    let mut start = 0;
    while start < cfg.runs {
        let end = (start + CHUNK).min(cfg.runs);
        let traces: Vec<RunTrace> = (start..end)
            .into_par_iter()
            .map(|e| run_episode(cfg, e))
            .collect::<Result<_, _>>()?;
        for trace in &traces {
            acc.push(trace, &cfg.env, &cfg.fairness)?;
        }
        start = end;
    }
    acc.finish()
}
