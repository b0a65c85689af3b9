//! Regret under the two rate-constrained benchmarks.
//!
//! * Strict: the benchmark pulls the best arm in every free slot, so regret
//!   is `sum over free slots of (mu* - mu(i_t))`. Initialization and
//!   reserved slots contribute nothing.
//! * Stochastic: the benchmark plays the mixture `p*` that favors the true
//!   best arm, so regret is `sum_{t > K} <p* - p_t, mu>`, which reduces to
//!   `(1 - K*v) * (mu* - mu(argmax_t))`. `p_t` is rebuilt from the recorded
//!   argmax, not from the sampled arm.
//!
//! Pseudo-regret uses the true means; the realized variants replace the
//! policy's expected reward with the observed one.

use fairbandit_core::{EnvSpec, FairnessConfig, PolicyKind, Provenance, SlotClass};
use serde::{Deserialize, Serialize};

use crate::error::HarnessError;
use crate::trace::RunTrace;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretReport {
    pub strict_pseudo_regret: Option<f64>,
    pub stochastic_pseudo_regret: Option<f64>,
    pub strict_realized_regret: Option<f64>,
    pub stochastic_realized_regret: Option<f64>,
    /// Cumulative pseudo-regret after each step, under the trace's own
    /// definition.
    pub pseudo_curve: Vec<f64>,
    pub realized_curve: Vec<f64>,
}

fn check_arms(trace: &RunTrace, env: &EnvSpec) -> Result<(), HarnessError> {
    if trace.num_arms != env.num_arms() {
        return Err(HarnessError::ArmCountMismatch {
            fairness: trace.num_arms,
            env: env.num_arms(),
        });
    }
    Ok(())
}

fn require_strict(trace: &RunTrace) -> Result<(), HarnessError> {
    match trace.policy {
        PolicyKind::Strict | PolicyKind::Unconstrained => Ok(()),
        found => Err(HarnessError::WrongPolicy {
            expected: "strict",
            found,
        }),
    }
}

fn require_stochastic(trace: &RunTrace) -> Result<(), HarnessError> {
    match trace.policy {
        PolicyKind::Stochastic => Ok(()),
        found => Err(HarnessError::WrongPolicy {
            expected: "stochastic",
            found,
        }),
    }
}

fn cumulative(terms: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut total = 0.0;
    terms
        .map(|x| {
            total += x;
            total
        })
        .collect()
}

pub fn strict_regret_curve(trace: &RunTrace, env: &EnvSpec) -> Result<Vec<f64>, HarnessError> {
    require_strict(trace)?;
    check_arms(trace, env)?;
    let gaps = env.gap_vector();
    Ok(cumulative(trace.steps.iter().map(|s| match s.slot_class {
        SlotClass::Free => gaps[s.decision.arm.index()],
        _ => 0.0,
    })))
}

pub fn strict_regret(trace: &RunTrace, env: &EnvSpec) -> Result<f64, HarnessError> {
    Ok(strict_regret_curve(trace, env)?.last().copied().unwrap_or(0.0))
}

fn strict_realized_curve(trace: &RunTrace, env: &EnvSpec) -> Vec<f64> {
    let best = env.best_mean();
    cumulative(trace.steps.iter().map(|s| match s.slot_class {
        SlotClass::Free => best - s.reward,
        _ => 0.0,
    }))
}

pub fn stochastic_regret_curve(
    trace: &RunTrace,
    env: &EnvSpec,
    cfg: &FairnessConfig,
) -> Result<Vec<f64>, HarnessError> {
    require_stochastic(trace)?;
    check_arms(trace, env)?;
    let gaps = env.gap_vector();
    let exploit = cfg.exploit_mass();
    Ok(cumulative(trace.steps.iter().map(|s| {
        match (s.decision.provenance, s.decision.ucb_argmax_arm) {
            (Provenance::Init, _) | (_, None) => 0.0,
            (_, Some(argmax)) => exploit * gaps[argmax.index()],
        }
    })))
}

pub fn stochastic_regret(
    trace: &RunTrace,
    env: &EnvSpec,
    cfg: &FairnessConfig,
) -> Result<f64, HarnessError> {
    Ok(stochastic_regret_curve(trace, env, cfg)?
        .last()
        .copied()
        .unwrap_or(0.0))
}

fn stochastic_realized_curve(trace: &RunTrace, env: &EnvSpec, cfg: &FairnessConfig) -> Vec<f64> {
    let means = env.means();
    let best = env.best_mean();
    let v = cfg.min_rate_f64();
    // <p*, mu>
    let benchmark = cfg.exploit_mass() * best + v * means.iter().sum::<f64>();
    cumulative(trace.steps.iter().map(|s| match s.decision.provenance {
        Provenance::Init => 0.0,
        _ => benchmark - s.reward,
    }))
}

/// Pseudo-regret curve under the definition matching the trace's policy.
pub fn pseudo_regret_curve(
    trace: &RunTrace,
    env: &EnvSpec,
    cfg: &FairnessConfig,
) -> Result<Vec<f64>, HarnessError> {
    match trace.policy {
        PolicyKind::Stochastic => stochastic_regret_curve(trace, env, cfg),
        _ => strict_regret_curve(trace, env),
    }
}

pub fn regret_report(
    trace: &RunTrace,
    env: &EnvSpec,
    cfg: &FairnessConfig,
) -> Result<RegretReport, HarnessError> {
    let pseudo_curve = pseudo_regret_curve(trace, env, cfg)?;
    let last = |c: &[f64]| c.last().copied().unwrap_or(0.0);
    Ok(match trace.policy {
        PolicyKind::Stochastic => {
            let realized_curve = stochastic_realized_curve(trace, env, cfg);
            RegretReport {
                strict_pseudo_regret: None,
                stochastic_pseudo_regret: Some(last(&pseudo_curve)),
                strict_realized_regret: None,
                stochastic_realized_regret: Some(last(&realized_curve)),
                pseudo_curve,
                realized_curve,
            }
        }
        _ => {
            let realized_curve = strict_realized_curve(trace, env);
            RegretReport {
                strict_pseudo_regret: Some(last(&pseudo_curve)),
                stochastic_pseudo_regret: None,
                strict_realized_regret: Some(last(&realized_curve)),
                stochastic_realized_regret: None,
                pseudo_curve,
                realized_curve,
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::StepRecord;
    use fairbandit_core::{ArmId, Decision, MixtureDistribution};

    fn step(t: u64, arm: usize, provenance: Provenance, argmax: Option<usize>) -> StepRecord {
        StepRecord {
            t,
            decision: Decision {
                arm: ArmId::from_number(arm).unwrap(),
                provenance,
                ucb_argmax_arm: argmax.map(|a| ArmId::from_number(a).unwrap()),
            },
            reward: 0.5,
            slot_class: provenance.slot_class(),
        }
    }

    fn trace(policy: PolicyKind, steps: Vec<StepRecord>) -> RunTrace {
        RunTrace {
            policy,
            num_arms: 2,
            steps,
            pull_counts: vec![],
            nonprescheduled_pull_counts: vec![],
        }
    }

    use Provenance::*;

    #[test]
    fn strict_zero_when_free_slots_pull_best() {
        let env = EnvSpec::bernoulli(&[0.9, 0.5], 0).unwrap();
        let t = trace(
            PolicyKind::Strict,
            vec![
                step(1, 1, Init, None),
                step(2, 2, Init, None),
                step(3, 1, Prescheduled, Some(1)),
                step(4, 1, UcbArgmax, Some(1)),
                step(5, 2, Prescheduled, Some(1)),
                step(6, 1, UcbArgmax, Some(1)),
            ],
        );
        assert_eq!(strict_regret(&t, &env).unwrap(), 0.0);
    }

    #[test]
    fn strict_counts_only_free_slots() {
        let env = EnvSpec::bernoulli(&[0.9, 0.5], 0).unwrap();
        let mut steps = vec![step(1, 1, Init, None), step(2, 2, Init, None)];
        steps.push(step(3, 2, Prescheduled, Some(1)));
        for t in 4..7 {
            steps.push(step(t, 2, UcbArgmax, Some(2)));
        }
        let r = strict_regret(&trace(PolicyKind::Strict, steps), &env).unwrap();
        assert!((r - 1.2).abs() < 1e-12, "{r}");
    }

    #[test]
    fn strict_without_free_slots_is_zero() {
        let env = EnvSpec::bernoulli(&[0.9, 0.5], 0).unwrap();
        let steps = (1..=10)
            .map(|t| {
                let p = if t <= 2 { Init } else { Prescheduled };
                step(t, ((t - 1) % 2 + 1) as usize, p, None)
            })
            .collect();
        assert_eq!(strict_regret(&trace(PolicyKind::Strict, steps), &env).unwrap(), 0.0);
    }

    #[test]
    fn stochastic_four_wrong_argmaxes() {
        let cfg = FairnessConfig::with_block_length(2, 4, 10).unwrap();
        let env = EnvSpec::bernoulli(&[0.9, 0.5], 0).unwrap();
        let mut steps = vec![step(1, 1, Init, None), step(2, 2, Init, None)];
        for t in 3..7 {
            steps.push(step(t, 1, UniformDraw, Some(2)));
        }
        for t in 7..11 {
            steps.push(step(t, 2, UcbArgmax, Some(1)));
        }
        let tr = trace(PolicyKind::Stochastic, steps);
        let r = stochastic_regret(&tr, &env, &cfg).unwrap();
        assert!((r - 0.8).abs() < 1e-12, "{r}");

        // cross-check against explicit <p*, mu> - <p_t, mu>
        let mu = env.means();
        let p_star = MixtureDistribution::favoring(&cfg, env.best_arm()).unwrap();
        let direct: f64 = tr.steps[2..]
            .iter()
            .map(|s| {
                let p_t = MixtureDistribution::favoring(&cfg, s.decision.ucb_argmax_arm.unwrap()).unwrap();
                p_star.expectation(&mu) - p_t.expectation(&mu)
            })
            .sum();
        assert!((r - direct).abs() < 1e-12);
    }

    #[test]
    fn stochastic_full_rate_is_zero() {
        let cfg = FairnessConfig::with_block_length(2, 2, 10).unwrap();
        let env = EnvSpec::bernoulli(&[0.9, 0.5], 0).unwrap();
        let mut steps = vec![step(1, 1, Init, None), step(2, 2, Init, None)];
        for t in 3..=10 {
            steps.push(step(t, 2, UniformDraw, Some(2)));
        }
        assert_eq!(
            stochastic_regret(&trace(PolicyKind::Stochastic, steps), &env, &cfg).unwrap(),
            0.0
        );
    }

    #[test]
    fn wrong_policy_is_rejected() {
        let cfg = FairnessConfig::with_block_length(2, 4, 10).unwrap();
        let env = EnvSpec::bernoulli(&[0.9, 0.5], 0).unwrap();
        let s = trace(PolicyKind::Stochastic, vec![step(1, 1, Init, None)]);
        assert!(matches!(strict_regret(&s, &env), Err(HarnessError::WrongPolicy { .. })));
        let st = trace(PolicyKind::Strict, vec![step(1, 1, Init, None)]);
        assert!(matches!(
            stochastic_regret(&st, &env, &cfg),
            Err(HarnessError::WrongPolicy { .. })
        ));
    }

    #[test]
    fn report_fills_matching_definition() {
        let cfg = FairnessConfig::with_block_length(2, 4, 10).unwrap();
        let env = EnvSpec::bernoulli(&[0.9, 0.5], 0).unwrap();
        let tr = trace(
            PolicyKind::Strict,
            vec![step(1, 1, Init, None), step(2, 2, Init, None), step(3, 2, UcbArgmax, Some(2))],
        );
        let rep = regret_report(&tr, &env, &cfg).unwrap();
        assert!((rep.strict_pseudo_regret.unwrap() - 0.4).abs() < 1e-12);
        assert!((rep.strict_realized_regret.unwrap() - 0.4).abs() < 1e-12);
        assert!(rep.stochastic_pseudo_regret.is_none());
        assert_eq!(rep.pseudo_curve.len(), 3);
    }
}
