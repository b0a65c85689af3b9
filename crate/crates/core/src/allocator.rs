use serde::{Deserialize, Serialize};

use crate::config::FairnessConfig;
use crate::decision::{Decision, PolicyKind};
use crate::error::BanditError;
use crate::policy::{select_stochastic, select_strict, select_unconstrained};
use crate::rng::StreamRng;
use crate::schedule::Schedule;
use crate::state::BanditState;

/// A policy bundled with everything it needs to run: configuration,
/// schedule, statistics and its private random stream.
///
/// `decide` then `observe` alternate; calling `decide` twice without an
/// observation re-draws for the stochastic policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawAllocator")]
pub struct Allocator {
    policy: PolicyKind,
    config: FairnessConfig,
    schedule: Option<Schedule>,
    state: BanditState,
    rng: StreamRng,
}

#[derive(Deserialize)]
struct RawAllocator {
    policy: PolicyKind,
    config: FairnessConfig,
    schedule: Option<Schedule>,
    state: BanditState,
    rng: StreamRng,
}

impl TryFrom<RawAllocator> for Allocator {
    type Error = BanditError;

    fn try_from(raw: RawAllocator) -> Result<Self, Self::Error> {
        let mut a = Allocator::new(raw.policy, raw.config, raw.schedule, raw.rng)?;
        if raw.state.num_arms() != a.config.num_arms() {
            return Err(BanditError::ArmCountMismatch {
                state: raw.state.num_arms(),
                config: a.config.num_arms(),
            });
        }
        if raw.state.clock() > a.config.horizon() {
            return Err(BanditError::HorizonExceeded {
                horizon: a.config.horizon(),
            });
        }
        a.state = raw.state;
        Ok(a)
    }
}

impl Allocator {
    /// A strict allocator with `v > 0` and no schedule gets the default one.
    pub fn new(
        policy: PolicyKind,
        config: FairnessConfig,
        schedule: Option<Schedule>,
        rng: StreamRng,
    ) -> Result<Self, BanditError> {
        let schedule = match (policy, config.block_length(), schedule) {
            (PolicyKind::Strict, Some(_), None) => Some(
                Schedule::build(&config, None, None).map_err(|_| BanditError::ScheduleMismatch)?,
            ),
            (PolicyKind::Strict, Some(d), Some(s)) => {
                if s.block_length() != d || s.num_arms() != config.num_arms() {
                    return Err(BanditError::ScheduleMismatch);
                }
                Some(s)
            }
            _ => None,
        };
        Ok(Self {
            policy,
            state: BanditState::new(config.num_arms()),
            config,
            schedule,
            rng,
        })
    }

    pub fn policy(&self) -> PolicyKind {
        self.policy
    }

    pub fn config(&self) -> &FairnessConfig {
        &self.config
    }

    pub fn schedule(&self) -> Option<&Schedule> {
        self.schedule.as_ref()
    }

    pub fn state(&self) -> &BanditState {
        &self.state
    }

    pub fn is_finished(&self) -> bool {
        self.state.clock() >= self.config.horizon()
    }

    pub fn decide(&mut self) -> Result<Decision, BanditError> {
        match self.policy {
            PolicyKind::Strict => select_strict(&self.state, &self.config, self.schedule.as_ref()),
            PolicyKind::Stochastic => select_stochastic(&self.state, &self.config, &mut self.rng),
            PolicyKind::Unconstrained => select_unconstrained(&self.state, &self.config),
        }
    }

    pub fn observe(&mut self, decision: &Decision, reward: f64) -> Result<(), BanditError> {
        self.state.update(decision, reward)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arm::ArmId;

    #[test]
    fn full_rate_strict_alternates() {
        let cfg = FairnessConfig::with_block_length(2, 2, 10).unwrap();
        let mut a = Allocator::new(PolicyKind::Strict, cfg, None, StreamRng::new(0, 0)).unwrap();
        let mut arms = Vec::new();
        while !a.is_finished() {
            let d = a.decide().unwrap();
            arms.push(d.arm.number());
            a.observe(&d, 0.5).unwrap();
        }
        assert_eq!(arms, vec![1, 2, 1, 2, 1, 2, 1, 2, 1, 2]);
    }

    #[test]
    fn snapshot_resumes_identically() {
        let cfg = FairnessConfig::with_block_length(3, 5, 60).unwrap();
        let mut a =
            Allocator::new(PolicyKind::Stochastic, cfg, None, StreamRng::new(11, 1)).unwrap();
        let reward = |t: u64, arm: ArmId| ((t * 7 + arm.index() as u64 * 3) % 10) as f64 / 10.0;
        for _ in 0..25 {
            let d = a.decide().unwrap();
            a.observe(&d, reward(a.state().clock(), d.arm)).unwrap();
        }
        let json = serde_json::to_string(&a).unwrap();
        let mut b: Allocator = serde_json::from_str(&json).unwrap();
        while !a.is_finished() {
            let da = a.decide().unwrap();
            let db = b.decide().unwrap();
            assert_eq!(da, db);
            let r = reward(a.state().clock(), da.arm);
            a.observe(&da, r).unwrap();
            b.observe(&db, r).unwrap();
        }
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_mismatched_schedule() {
        let cfg = FairnessConfig::with_block_length(2, 4, 10).unwrap();
        let other = Schedule::build(&FairnessConfig::with_block_length(2, 3, 10).unwrap(), None, None)
            .unwrap();
        assert_eq!(
            Allocator::new(PolicyKind::Strict, cfg, Some(other), StreamRng::new(0, 0)),
            Err(BanditError::ScheduleMismatch)
        );
    }
}
