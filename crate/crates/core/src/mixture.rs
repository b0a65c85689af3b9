use serde::{Deserialize, Serialize};

use crate::arm::ArmId;
use crate::config::FairnessConfig;
use crate::error::BanditError;
use crate::state::BanditState;

/// Per-arm probabilities of the stochastic policy at one step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureDistribution {
    probabilities: Vec<f64>,
}

impl MixtureDistribution {
    /// `(1 - K*v) + v` on `favored`, `v` everywhere else.
    ///
    /// With the UCB argmax as `favored` this is the policy's distribution
    /// `p_t`; with the true best arm it is the benchmark `p*`.
    pub fn favoring(cfg: &FairnessConfig, favored: ArmId) -> Result<Self, BanditError> {
        let k = cfg.num_arms();
        if favored.index() >= k {
            return Err(BanditError::ArmOutOfRange {
                arm: favored,
                num_arms: k,
            });
        }
        let v = cfg.min_rate_f64();
        let mut probabilities = vec![v; k];
        probabilities[favored.index()] = cfg.exploit_mass() + v;
        Ok(Self { probabilities })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn probability(&self, arm: ArmId) -> f64 {
        self.probabilities.get(arm.index()).copied().unwrap_or(0.0)
    }

    /// `<p, values>`.
    pub fn expectation(&self, values: &[f64]) -> f64 {
        self.probabilities
            .iter()
            .zip(values)
            .map(|(p, x)| p * x)
            .sum()
    }
}

/// The stochastic policy's distribution given the current statistics.
pub fn mixture_of(
    state: &BanditState,
    cfg: &FairnessConfig,
) -> Result<MixtureDistribution, BanditError> {
    let argmax = state.ucb_argmax(cfg.horizon())?;
    MixtureDistribution::favoring(cfg, argmax)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decision::Decision;

    fn arm(n: usize) -> ArmId {
        ArmId::from_number(n).unwrap()
    }

    fn assert_probs(m: &MixtureDistribution, expected: &[f64]) {
        for (p, e) in m.probabilities().iter().zip(expected) {
            assert!((p - e).abs() < 1e-12, "{:?} vs {expected:?}", m.probabilities());
        }
        let total: f64 = m.probabilities().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_arms_quarter_rate() {
        let c = FairnessConfig::with_block_length(2, 4, 10).unwrap();
        assert_probs(&MixtureDistribution::favoring(&c, arm(1)).unwrap(), &[0.75, 0.25]);
    }

    #[test]
    fn full_rate_is_uniform() {
        let c = FairnessConfig::with_block_length(4, 4, 10).unwrap();
        for a in 1..=4 {
            assert_probs(
                &MixtureDistribution::favoring(&c, arm(a)).unwrap(),
                &[0.25; 4],
            );
        }
    }

    #[test]
    fn three_arms_sixth_rate() {
        let c = FairnessConfig::with_block_length(3, 6, 10).unwrap();
        assert_probs(
            &MixtureDistribution::favoring(&c, arm(2)).unwrap(),
            &[1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0],
        );
    }

    #[test]
    fn mixture_follows_the_argmax() {
        let c = FairnessConfig::with_block_length(2, 4, 10).unwrap();
        let mut s = BanditState::new(2);
        assert_eq!(
            mixture_of(&s, &c),
            Err(BanditError::ArmNeverPulled(arm(1)))
        );
        s.update(&Decision::init(arm(1)), 0.1).unwrap();
        s.update(&Decision::init(arm(2)), 0.9).unwrap();
        assert_probs(&mixture_of(&s, &c).unwrap(), &[0.25, 0.75]);
    }
}
