//! Reward environments with known means, and the teammate score transform.

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};
use thiserror::Error;

use crate::arm::ArmId;

/// Score normalizer used when arms are human players.
pub const DEFAULT_SCORE_NORMALIZER: f64 = 300.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnvError {
    #[error("arm {arm} out of range for {num_arms} arms")]
    ArmOutOfRange { arm: ArmId, num_arms: usize },
    #[error("environment needs at least one arm")]
    NoArms,
    #[error("arm {arm}: {reason}")]
    InvalidParameter { arm: usize, reason: String },
    #[error("teammate has no turns yet")]
    ZeroTurns,
    #[error("score {0} is negative")]
    NegativeScore(f64),
    #[error("normalizer {0} must be positive")]
    InvalidNormalizer(f64),
}

/// Reward distribution of one arm. Samples always lie in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ArmDistribution {
    Bernoulli { p: f64 },
    /// Normal sample clamped to `[0, 1]`.
    ClippedGaussian { mean: f64, stddev: f64 },
    /// Deterministic reward, clamped to `[0, 1]`.
    Fixed { value: f64 },
}

impl ArmDistribution {
    fn check(&self) -> Result<(), String> {
        match *self {
            ArmDistribution::Bernoulli { p } => {
                if !(0.0..=1.0).contains(&p) {
                    return Err(format!("bernoulli p = {p} outside [0, 1]"));
                }
            }
            ArmDistribution::ClippedGaussian { mean, stddev } => {
                if !mean.is_finite() || !stddev.is_finite() || stddev < 0.0 {
                    return Err(format!("bad gaussian parameters ({mean}, {stddev})"));
                }
            }
            ArmDistribution::Fixed { value } => {
                if !value.is_finite() {
                    return Err(format!("fixed value {value} is not finite"));
                }
            }
        }
        Ok(())
    }

    /// Draws one reward, consuming exactly one uniform from `rng`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        match *self {
            ArmDistribution::Bernoulli { p } => {
                if u < p {
                    1.0
                } else {
                    0.0
                }
            }
            ArmDistribution::ClippedGaussian { mean, stddev } => {
                if stddev == 0.0 {
                    return mean.clamp(0.0, 1.0);
                }
                let normal = Normal::new(mean, stddev).expect("validated parameters");
                normal.inverse_cdf(u).clamp(0.0, 1.0)
            }
            ArmDistribution::Fixed { value } => value.clamp(0.0, 1.0),
        }
    }

    /// Mean of the (clamped) reward.
    pub fn expected_value(&self) -> f64 {
        match *self {
            ArmDistribution::Bernoulli { p } => p,
            ArmDistribution::Fixed { value } => value.clamp(0.0, 1.0),
            ArmDistribution::ClippedGaussian { mean, stddev } => {
                if stddev == 0.0 {
                    return mean.clamp(0.0, 1.0);
                }
                let std = Normal::standard();
                let a = -mean / stddev;
                let b = (1.0 - mean) / stddev;
                let (cdf_a, cdf_b) = (std.cdf(a), std.cdf(b));
                // P(X > 1) * 1 + E[X; 0 <= X <= 1]
                let m = (1.0 - cdf_b) + mean * (cdf_b - cdf_a) + stddev * (std.pdf(a) - std.pdf(b));
                // cancellation can leave a few ulps outside the range in the tails
                m.clamp(0.0, 1.0)
            }
        }
    }

    pub fn is_deterministic(&self) -> bool {
        match *self {
            ArmDistribution::Fixed { .. } => true,
            ArmDistribution::Bernoulli { p } => p == 0.0 || p == 1.0,
            ArmDistribution::ClippedGaussian { stddev, .. } => stddev == 0.0,
        }
    }
}

/// Ordered per-arm distributions plus the environment's own seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawEnvSpec")]
pub struct EnvSpec {
    pub arms: Vec<ArmDistribution>,
    pub seed: u64,
}

#[derive(Deserialize)]
struct RawEnvSpec {
    arms: Vec<ArmDistribution>,
    #[serde(default)]
    seed: u64,
}

impl TryFrom<RawEnvSpec> for EnvSpec {
    type Error = EnvError;

    fn try_from(raw: RawEnvSpec) -> Result<Self, Self::Error> {
        EnvSpec::new(raw.arms, raw.seed)
    }
}

impl EnvSpec {
    pub fn new(arms: Vec<ArmDistribution>, seed: u64) -> Result<Self, EnvError> {
        if arms.is_empty() {
            return Err(EnvError::NoArms);
        }
        for (i, a) in arms.iter().enumerate() {
            a.check()
                .map_err(|reason| EnvError::InvalidParameter { arm: i + 1, reason })?;
        }
        Ok(Self { arms, seed })
    }

    pub fn bernoulli(means: &[f64], seed: u64) -> Result<Self, EnvError> {
        Self::new(
            means.iter().map(|&p| ArmDistribution::Bernoulli { p }).collect(),
            seed,
        )
    }

    pub fn fixed(values: &[f64], seed: u64) -> Result<Self, EnvError> {
        Self::new(
            values
                .iter()
                .map(|&value| ArmDistribution::Fixed { value })
                .collect(),
            seed,
        )
    }

    pub fn num_arms(&self) -> usize {
        self.arms.len()
    }

    pub fn means(&self) -> Vec<f64> {
        self.arms.iter().map(ArmDistribution::expected_value).collect()
    }

    pub fn best_mean(&self) -> f64 {
        self.means().into_iter().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Lowest-numbered arm with the largest mean.
    pub fn best_arm(&self) -> ArmId {
        let means = self.means();
        let mut best = 0;
        for (i, &m) in means.iter().enumerate() {
            if m > means[best] {
                best = i;
            }
        }
        ArmId::from_index(best)
    }

    /// `max_j mu(j) - mu(i)` for every arm.
    pub fn gap_vector(&self) -> Vec<f64> {
        let best = self.best_mean();
        self.means().into_iter().map(|m| best - m).collect()
    }

    pub fn sample_reward<R: Rng + ?Sized>(&self, arm: ArmId, rng: &mut R) -> Result<f64, EnvError> {
        let dist = self.arms.get(arm.index()).ok_or(EnvError::ArmOutOfRange {
            arm,
            num_arms: self.arms.len(),
        })?;
        Ok(dist.sample(rng))
    }
}

/// A teammate's cumulative game score and turn count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TeammateScore {
    pub cumulative_score: f64,
    pub turns: u64,
    pub normalizer: f64,
}

impl TeammateScore {
    pub fn new(cumulative_score: f64, turns: u64) -> Self {
        Self {
            cumulative_score,
            turns,
            normalizer: DEFAULT_SCORE_NORMALIZER,
        }
    }
}

/// `min(1, S / (M * n))`: average score per turn, normalized.
pub fn teammate_reward(score: &TeammateScore) -> Result<f64, EnvError> {
    if score.turns == 0 {
        return Err(EnvError::ZeroTurns);
    }
    if score.normalizer.is_nan() || score.normalizer <= 0.0 || score.normalizer.is_infinite() {
        return Err(EnvError::InvalidNormalizer(score.normalizer));
    }
    if score.cumulative_score.is_nan() || score.cumulative_score < 0.0 {
        return Err(EnvError::NegativeScore(score.cumulative_score));
    }
    Ok((score.cumulative_score / (score.normalizer * score.turns as f64)).min(1.0))
}
