//! Randomized invariant checks over many small configurations.

use fairbandit_core::{
    min_pull_lower_bound, select_strict, ArmId, BanditError, BanditState, Channel, Decision,
    EnvSpec, FairnessConfig, PolicyKind, Schedule, StreamRng,
};
use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::experiment::{run_episode, ExperimentConfig};
use crate::regret::{stochastic_regret_curve, strict_regret_curve};

pub const MIN_ARMS: usize = 2;
pub const MAX_ARMS: usize = 5;
pub const MAX_BLOCK_LENGTH: u64 = 12;
pub const MAX_HORIZON: u64 = 5000;

/// A sampled configuration: `K` in `[2, 5]`, `1/v` in `[K, 12]`, `T` in
/// `[K, 5000]`, Bernoulli means uniform on `[0, 1]`, and a uniformly random
/// `(S, g)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzInstance {
    pub trial: u64,
    pub fairness: FairnessConfig,
    pub schedule: Schedule,
    pub env: EnvSpec,
}

pub fn sample_instance(seed: u64, trial: u64) -> FuzzInstance {
    let mut rng = StreamRng::new(seed, trial);
    let k = rng.random_range(MIN_ARMS..=MAX_ARMS);
    let d = rng.random_range(k as u64..=MAX_BLOCK_LENGTH);
    let t = rng.random_range(k as u64..=MAX_HORIZON);
    let means: Vec<f64> = (0..k).map(|_| rng.random::<f64>()).collect();
    let slots: Vec<u64> = sample(&mut rng, d as usize, k)
        .into_iter()
        .map(|i| i as u64 + 1)
        .collect();
    let arms: Vec<ArmId> = (0..k).map(ArmId::from_index).collect();
    let fairness = FairnessConfig::with_block_length(k, d, t).expect("sampled config is valid");
    let schedule = Schedule::build(&fairness, Some(&slots), Some(&arms)).expect("distinct slots");
    let env = EnvSpec::bernoulli(&means, rng.random()).expect("means in [0, 1]");
    FuzzInstance {
        trial,
        fairness,
        schedule,
        env,
    }
}

/// First violation found, with enough context to replay it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub instance: FuzzInstance,
    pub step: u64,
    pub arm: ArmId,
    pub observed: String,
    pub expected: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzReport {
    pub check: String,
    pub trials: u64,
    pub steps_checked: u64,
    pub counterexample: Option<Counterexample>,
}

impl FuzzReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Signature of a strict-style selection rule, so the fuzzer can also be
/// pointed at deliberately broken variants.
pub type Selector =
    dyn Fn(&BanditState, &FairnessConfig, &Schedule) -> Result<Decision, BanditError> + Sync;

fn check_floor(instance: &FuzzInstance, select: &Selector) -> (u64, Option<Counterexample>) {
    let cfg = &instance.fairness;
    let mut rng = StreamRng::for_episode(instance.env.seed, instance.trial, Channel::Environment);
    let mut state = BanditState::new(cfg.num_arms());
    let mut checked = 0;
    while state.clock() < cfg.horizon() {
        let decision = select(&state, cfg, &instance.schedule).expect("valid strict instance");
        let reward = instance
            .env
            .sample_reward(decision.arm, &mut rng)
            .expect("arm in range");
        state.update(&decision, reward).expect("reward in range");
        let t = state.clock();
        let bound = min_pull_lower_bound(t, cfg);
        checked += 1;
        for (i, &n) in state.pull_counts().iter().enumerate() {
            if n < bound {
                return (
                    checked,
                    Some(Counterexample {
                        instance: instance.clone(),
                        step: t,
                        arm: ArmId::from_index(i),
                        observed: format!("n_t = {n}"),
                        expected: format!("n_t >= floor((t - K) * v) + 1 = {bound}"),
                    }),
                );
            }
        }
    }
    (checked, None)
}

/// Strict policy: `n_t(i) >= floor((t - K) v) + 1` for every `t >= K`.
pub fn fairness_fuzz(trials: u64, seed: u64) -> FuzzReport {
    fairness_fuzz_with(trials, seed, &|s, c, sch| select_strict(s, c, Some(sch)))
}

pub fn fairness_fuzz_with(trials: u64, seed: u64, select: &Selector) -> FuzzReport {
    let results: Vec<(u64, Option<Counterexample>)> = (0..trials)
        .into_par_iter()
        .map(|trial| check_floor(&sample_instance(seed, trial), select))
        .collect();
    let steps_checked = results.iter().map(|(n, _)| n).sum();
    FuzzReport {
        check: "strict anytime pull floor".into(),
        trials,
        steps_checked,
        counterexample: results.into_iter().find_map(|(_, c)| c),
    }
}

fn check_curve(instance: &FuzzInstance, policy: PolicyKind, seed: u64) -> (u64, Option<Counterexample>) {
    let mut exp = ExperimentConfig::new(policy, instance.fairness, instance.env.clone(), 1, seed)
        .expect("fuzz instance is consistent");
    if policy == PolicyKind::Strict {
        exp = exp
            .with_schedule(instance.schedule.clone())
            .expect("schedule matches");
    }
    let trace = run_episode(&exp, instance.trial).expect("episode runs");
    let curve = match policy {
        PolicyKind::Stochastic => stochastic_regret_curve(&trace, &exp.env, &exp.fairness),
        _ => strict_regret_curve(&trace, &exp.env),
    }
    .expect("policy matches");
    let mut prev = 0.0;
    for (i, &x) in curve.iter().enumerate() {
        if x < 0.0 || x < prev {
            return (
                i as u64 + 1,
                Some(Counterexample {
                    instance: instance.clone(),
                    step: i as u64 + 1,
                    arm: trace.steps[i].decision.arm,
                    observed: format!("cumulative regret {x} after {prev}"),
                    expected: "nonnegative and nondecreasing".into(),
                }),
            );
        }
        prev = x;
    }
    (curve.len() as u64, None)
}

/// Cumulative pseudo-regret under `policy` is `>= 0` and nondecreasing on
/// every sampled instance.
pub fn regret_fuzz(trials: u64, seed: u64, policy: PolicyKind) -> FuzzReport {
    let results: Vec<(u64, Option<Counterexample>)> = (0..trials)
        .into_par_iter()
        .map(|trial| check_curve(&sample_instance(seed, trial), policy, seed))
        .collect();
    FuzzReport {
        check: format!("{policy} pseudo-regret monotone and nonnegative"),
        trials,
        steps_checked: results.iter().map(|(n, _)| n).sum(),
        counterexample: results.into_iter().find_map(|(_, c)| c),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use fairbandit_core::Provenance;

    #[test]
    fn sampled_instances_respect_ranges() {
        for trial in 0..200 {
            let inst = sample_instance(5, trial);
            let k = inst.fairness.num_arms();
            let d = inst.fairness.block_length().unwrap();
            assert!((MIN_ARMS..=MAX_ARMS).contains(&k));
            assert!((k as u64..=MAX_BLOCK_LENGTH).contains(&d));
            assert!((k as u64..=MAX_HORIZON).contains(&inst.fairness.horizon()));
            assert_eq!(inst.env.num_arms(), k);
        }
        assert_eq!(sample_instance(5, 7), sample_instance(5, 7));
    }

    #[test]
    fn zero_trials_pass_trivially() {
        let r = fairness_fuzz(0, 1);
        assert!(r.passed());
        assert_eq!(r.steps_checked, 0);
    }

    #[test]
    fn small_fuzz_passes() {
        assert!(fairness_fuzz(100, 9).passed());
    }

    #[test]
    fn skipping_a_reserved_slot_is_caught() {
        // in block 2, hand the first reserved slot to the UCB argmax instead
        let broken: &Selector = &|state, cfg, schedule| {
            let mut d = select_strict(state, cfg, Some(schedule))?;
            let step = state.clock() + 1;
            if let Some((2, offset)) = schedule.locate(step) {
                if d.provenance == Provenance::Prescheduled && offset == schedule.slots()[0] {
                    let argmax = state.ucb_argmax(cfg.horizon())?;
                    // pull some arm other than the reserved one
                    let other = if argmax == d.arm {
                        ArmId::from_index((d.arm.index() + 1) % cfg.num_arms())
                    } else {
                        argmax
                    };
                    d = Decision {
                        arm: other,
                        provenance: Provenance::UcbArgmax,
                        ucb_argmax_arm: Some(argmax),
                    };
                }
            }
            Ok(d)
        };
        let report = fairness_fuzz_with(200, 3, broken);
        let cx = report.counterexample.expect("mutation must be detected");
        assert!(cx.step >= cx.instance.fairness.num_arms() as u64);
    }

    #[test]
    fn regret_curves_pass() {
        assert!(regret_fuzz(50, 2, PolicyKind::Stochastic).passed());
        assert!(regret_fuzz(50, 2, PolicyKind::Strict).passed());
    }
}
