//! Naive reference implementation for tiny deterministic instances.
//!
//! Shares nothing with the incremental policy code beyond the config types:
//! every index is recomputed from the full history, blocks are walked
//! literally, and the default reserved offsets are derived here again.

use fairbandit_core::{
    ArmDistribution, ArmId, EnvSpec, FairnessConfig, PolicyKind, Schedule, StreamRng,
};
use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::HarnessError;
use crate::experiment::{run_episode, ExperimentConfig};

pub const ORACLE_MAX_HORIZON: u64 = 12;

fn fixed_rewards(env: &EnvSpec) -> Result<Vec<f64>, HarnessError> {
    env.arms
        .iter()
        .enumerate()
        .map(|(i, a)| match a {
            ArmDistribution::Fixed { value } => Ok(value.clamp(0.0, 1.0)),
            _ => Err(HarnessError::NotFixedRewards(i + 1)),
        })
        .collect()
}

/// argmax of mean + 2 sqrt(ln T / n), lowest arm on ties.
fn naive_argmax(history: &[(usize, f64)], k: usize, horizon: u64) -> usize {
    let ln_t = (horizon as f64).ln();
    let mut best = 0;
    let mut best_value = f64::NEG_INFINITY;
    for arm in 0..k {
        let mut n = 0u64;
        let mut sum = 0.0;
        for &(a, r) in history {
            if a == arm {
                n += 1;
                sum += r;
            }
        }
        let value = sum / n as f64 + 2.0 * (ln_t / n as f64).sqrt();
        if value > best_value {
            best = arm;
            best_value = value;
        }
    }
    best
}

/// Decision sequence (1-based arms) of the strict or unconstrained policy.
pub fn brute_force_oracle(cfg: &ExperimentConfig) -> Result<Vec<ArmId>, HarnessError> {
    let horizon = cfg.fairness.horizon();
    if horizon > ORACLE_MAX_HORIZON {
        return Err(HarnessError::HorizonTooLarge {
            horizon,
            max: ORACLE_MAX_HORIZON,
        });
    }
    if cfg.policy == PolicyKind::Stochastic {
        return Err(HarnessError::WrongPolicy {
            expected: "strict",
            found: cfg.policy,
        });
    }
    let rewards = fixed_rewards(&cfg.env)?;
    let k = cfg.fairness.num_arms();
    let mut history: Vec<(usize, f64)> = Vec::new();
    let pull = |arm: usize, history: &mut Vec<(usize, f64)>| history.push((arm, rewards[arm]));

    for arm in 0..k.min(horizon as usize) {
        pull(arm, &mut history);
    }

    let blocks = match (cfg.policy, cfg.fairness.block_length()) {
        (PolicyKind::Strict, Some(d)) => {
            let reserved: Vec<(u64, usize)> = match &cfg.schedule {
                Some(s) => s.assignment().into_iter().map(|(o, a)| (o, a.index())).collect(),
                None => (0..k).map(|m| (1 + m as u64 * (d / k as u64), m)).collect(),
            };
            Some((d, reserved))
        }
        _ => None,
    };

    match blocks {
        None => {
            while (history.len() as u64) < horizon {
                let arm = naive_argmax(&history, k, horizon);
                pull(arm, &mut history);
            }
        }
        Some((d, reserved)) => {
            let mut tau = k as u64 + 1;
            while tau <= horizon {
                for t in tau..(tau + d).min(horizon + 1) {
                    let offset = t - tau + 1;
                    let arm = match reserved.iter().find(|&&(o, _)| o == offset) {
                        Some(&(_, a)) => a,
                        None => naive_argmax(&history, k, horizon),
                    };
                    pull(arm, &mut history);
                }
                tau += d;
            }
        }
    }
    Ok(history
        .into_iter()
        .map(|(a, _)| ArmId::from_index(a))
        .collect())
}

/// A random tiny instance: `K` in `[2, 4]`, `1/v` in `{0} ∪ [K, 8]`,
/// `T` in `[K, 12]`, fixed rewards on a coarse grid so ties actually occur,
/// and a random schedule half the time.
pub fn tiny_instance(seed: u64, index: u64) -> ExperimentConfig {
    let mut rng = StreamRng::new(seed, index);
    let k = rng.random_range(2..=4usize);
    let horizon = rng.random_range(k as u64..=ORACLE_MAX_HORIZON);
    let values: Vec<f64> = (0..k)
        .map(|_| rng.random_range(0..=10u32) as f64 / 10.0)
        .collect();
    let env = EnvSpec::fixed(&values, 0).expect("finite values");
    let unconstrained = rng.random_bool(0.2);
    let (policy, fairness) = if unconstrained {
        let policy = if rng.random_bool(0.5) {
            PolicyKind::Unconstrained
        } else {
            PolicyKind::Strict
        };
        (policy, FairnessConfig::unconstrained(k, horizon).expect("valid"))
    } else {
        let d = rng.random_range(k as u64..=8);
        let fairness = FairnessConfig::with_block_length(k, d, horizon).expect("valid");
        (PolicyKind::Strict, fairness)
    };
    let mut cfg =
        ExperimentConfig::new(policy, fairness, env, 1, rng.random()).expect("consistent");
    if let (PolicyKind::Strict, Some(d)) = (policy, fairness.block_length()) {
        if rng.random_bool(0.5) {
            let slots: Vec<u64> = sample(&mut rng, d as usize, k)
                .into_iter()
                .map(|i| i as u64 + 1)
                .collect();
            let arms: Vec<ArmId> = sample(&mut rng, k, k)
                .into_iter()
                .map(ArmId::from_index)
                .collect();
            let schedule = Schedule::build(&fairness, Some(&slots), Some(&arms)).expect("valid");
            cfg = cfg.with_schedule(schedule).expect("matches");
        }
    }
    cfg
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleMismatch {
    pub instance: ExperimentConfig,
    pub oracle: Vec<ArmId>,
    pub simulated: Vec<ArmId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub instances: u64,
    pub mismatch: Option<OracleMismatch>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.mismatch.is_none()
    }
}

/// Compares `run_episode` against the oracle on `count` tiny instances.
pub fn oracle_sweep(count: u64, seed: u64) -> Result<OracleReport, HarnessError> {
    for i in 0..count {
        let cfg = tiny_instance(seed, i);
        let oracle = brute_force_oracle(&cfg)?;
        let simulated: Vec<ArmId> = run_episode(&cfg, 0)?
            .steps
            .iter()
            .map(|s| s.decision.arm)
            .collect();
        if oracle != simulated {
            return Ok(OracleReport {
                instances: i + 1,
                mismatch: Some(OracleMismatch {
                    instance: cfg,
                    oracle,
                    simulated,
                }),
            });
        }
    }
    Ok(OracleReport {
        instances: count,
        mismatch: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn numbers(v: &[ArmId]) -> Vec<usize> {
        v.iter().map(|a| a.number()).collect()
    }

    fn strict(values: &[f64], d: u64, t: u64) -> ExperimentConfig {
        let fairness = FairnessConfig::with_block_length(values.len(), d, t).unwrap();
        let env = EnvSpec::fixed(values, 0).unwrap();
        ExperimentConfig::new(PolicyKind::Strict, fairness, env, 1, 0).unwrap()
    }

    #[test]
    fn quarter_rate_hand_trace() {
        let seq = brute_force_oracle(&strict(&[1.0, 0.0], 4, 8)).unwrap();
        assert_eq!(numbers(&seq), vec![1, 2, 1, 1, 2, 1, 1, 1]);
    }

    #[test]
    fn full_rate_round_robin() {
        let seq = brute_force_oracle(&strict(&[0.3, 0.7], 2, 6)).unwrap();
        assert_eq!(numbers(&seq), vec![1, 2, 1, 2, 1, 2]);
    }

    #[test]
    fn equal_rewards_unconstrained_matches_simulation() {
        let fairness = FairnessConfig::unconstrained(2, 12).unwrap();
        let env = EnvSpec::fixed(&[0.6, 0.6], 0).unwrap();
        let cfg = ExperimentConfig::new(PolicyKind::Unconstrained, fairness, env, 1, 0).unwrap();
        let seq = brute_force_oracle(&cfg).unwrap();
        // equal means: the less-pulled arm has the larger bonus, ties go low
        assert_eq!(numbers(&seq), vec![1, 2, 1, 2, 1, 2, 1, 2, 1, 2, 1, 2]);
        let sim: Vec<ArmId> = run_episode(&cfg, 0).unwrap().steps.iter().map(|s| s.decision.arm).collect();
        assert_eq!(seq, sim);
    }

    #[test]
    fn rejects_long_horizons_and_random_rewards() {
        assert!(matches!(
            brute_force_oracle(&strict(&[1.0, 0.0], 4, 13)),
            Err(HarnessError::HorizonTooLarge { horizon: 13, .. })
        ));
        let fairness = FairnessConfig::with_block_length(2, 4, 8).unwrap();
        let env = EnvSpec::bernoulli(&[0.5, 0.5], 0).unwrap();
        let cfg = ExperimentConfig::new(PolicyKind::Strict, fairness, env, 1, 0).unwrap();
        assert!(matches!(brute_force_oracle(&cfg), Err(HarnessError::NotFixedRewards(1))));
    }

    #[test]
    fn sweep_agrees() {
        let report = oracle_sweep(200, 11).unwrap();
        assert!(report.passed(), "{:?}", report.mismatch);
    }
}
