//! Fairness configuration: arm count, minimum pull rate and horizon.
//!
//! The minimum pull rate `v` is held as an exact fraction. A valid nonzero
//! rate is always `1/d` with `d >= K`, where `d` is the preschedule block
//! length. `v = 0` disables the block machinery entirely.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("at least one arm is required")]
    ZeroArms,
    #[error("horizon must be a positive number of steps")]
    ZeroHorizon,
    #[error("rate too high: K*v = {num_arms}*{rate} exceeds 1")]
    RateTooHigh { num_arms: usize, rate: Rate },
    #[error("1/v is not an integer for v = {0}")]
    NonIntegralBlock(Rate),
    #[error("invalid rate {0:?}: expected a fraction like 1/4, a decimal, or 0")]
    InvalidRate(String),
}

/// A nonnegative rational number `num/den` in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rate {
    num: u64,
    den: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Rate {
    pub const ZERO: Rate = Rate { num: 0, den: 1 };

    pub fn new(num: u64, den: u64) -> Result<Self, ConfigError> {
        if den == 0 {
            return Err(ConfigError::InvalidRate(format!("{num}/{den}")));
        }
        if num == 0 {
            return Ok(Self::ZERO);
        }
        let g = gcd(num, den);
        Ok(Self {
            num: num / g,
            den: den / g,
        })
    }

    /// `1/d`.
    pub fn one_over(d: u64) -> Result<Self, ConfigError> {
        Self::new(1, d)
    }

    pub fn numerator(self) -> u64 {
        self.num
    }

    pub fn denominator(self) -> u64 {
        self.den
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.num == 0 {
            write!(f, "0")
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for Rate {
    type Err = ConfigError;

    /// Accepts `p/q`, a plain integer, or a finite decimal such as `0.25`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || ConfigError::InvalidRate(s.to_string());
        if let Some((p, q)) = s.split_once('/') {
            let p: u64 = p.trim().parse().map_err(|_| bad())?;
            let q: u64 = q.trim().parse().map_err(|_| bad())?;
            return Rate::new(p, q).map_err(|_| bad());
        }
        let (int_part, frac_part) = s.split_once('.').unwrap_or((s, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
            || frac_part.len() > 18
        {
            return Err(bad());
        }
        let den = 10u64.pow(frac_part.len() as u32);
        let int: u64 = if int_part.is_empty() {
            0
        } else {
            int_part.parse().map_err(|_| bad())?
        };
        let frac: u64 = if frac_part.is_empty() {
            0
        } else {
            frac_part.parse().map_err(|_| bad())?
        };
        let num = int
            .checked_mul(den)
            .and_then(|x| x.checked_add(frac))
            .ok_or_else(bad)?;
        Rate::new(num, den)
    }
}

impl Serialize for Rate {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rate {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Validated `(K, v, T)` triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawFairnessConfig", into = "RawFairnessConfig")]
pub struct FairnessConfig {
    num_arms: usize,
    /// `1/v`, or `None` when unconstrained.
    block_length: Option<u64>,
    horizon: u64,
}

#[derive(Serialize, Deserialize)]
struct RawFairnessConfig {
    num_arms: usize,
    min_rate: Rate,
    horizon: u64,
}

impl TryFrom<RawFairnessConfig> for FairnessConfig {
    type Error = ConfigError;

    fn try_from(raw: RawFairnessConfig) -> Result<Self, Self::Error> {
        FairnessConfig::new(raw.num_arms, raw.min_rate, raw.horizon)
    }
}

impl From<FairnessConfig> for RawFairnessConfig {
    fn from(cfg: FairnessConfig) -> Self {
        RawFairnessConfig {
            num_arms: cfg.num_arms,
            min_rate: cfg.min_rate(),
            horizon: cfg.horizon,
        }
    }
}

impl FairnessConfig {
    /// Validates `(K, v, T)` and normalizes `v` to `1/d`.
    pub fn new(num_arms: usize, min_rate: Rate, horizon: u64) -> Result<Self, ConfigError> {
        if num_arms == 0 {
            return Err(ConfigError::ZeroArms);
        }
        if horizon == 0 {
            return Err(ConfigError::ZeroHorizon);
        }
        if min_rate.is_zero() {
            return Ok(Self {
                num_arms,
                block_length: None,
                horizon,
            });
        }
        // K * num / den > 1, in integers
        let k_num = (num_arms as u128) * (min_rate.num as u128);
        if k_num > min_rate.den as u128 {
            return Err(ConfigError::RateTooHigh {
                num_arms,
                rate: min_rate,
            });
        }
        if min_rate.num != 1 {
            return Err(ConfigError::NonIntegralBlock(min_rate));
        }
        Ok(Self {
            num_arms,
            block_length: Some(min_rate.den),
            horizon,
        })
    }

    pub fn unconstrained(num_arms: usize, horizon: u64) -> Result<Self, ConfigError> {
        Self::new(num_arms, Rate::ZERO, horizon)
    }

    /// Shorthand for `v = 1/block_length`.
    pub fn with_block_length(
        num_arms: usize,
        block_length: u64,
        horizon: u64,
    ) -> Result<Self, ConfigError> {
        Self::new(num_arms, Rate::one_over(block_length)?, horizon)
    }

    pub fn num_arms(&self) -> usize {
        self.num_arms
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn block_length(&self) -> Option<u64> {
        self.block_length
    }

    pub fn is_unconstrained(&self) -> bool {
        self.block_length.is_none()
    }

    pub fn min_rate(&self) -> Rate {
        match self.block_length {
            Some(d) => Rate { num: 1, den: d },
            None => Rate::ZERO,
        }
    }

    pub fn min_rate_f64(&self) -> f64 {
        self.min_rate().as_f64()
    }

    /// `1 - K*v`, the probability mass the stochastic policy puts on the UCB
    /// argmax beyond the per-arm floor. Computed as `(d - K)/d`, never negative.
    pub fn exploit_mass(&self) -> f64 {
        match self.block_length {
            Some(d) => (d - self.num_arms as u64) as f64 / d as f64,
            None => 1.0,
        }
    }

    /// Same triple with a different horizon.
    pub fn with_horizon(&self, horizon: u64) -> Result<Self, ConfigError> {
        Self::new(self.num_arms, self.min_rate(), horizon)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rate(s: &str) -> Rate {
        s.parse().unwrap()
    }

    #[test]
    fn accepts_quarter_rate_for_two_arms() {
        let cfg = FairnessConfig::new(2, rate("1/4"), 30).unwrap();
        assert_eq!(cfg.block_length(), Some(4));
        assert_eq!(cfg.min_rate().to_string(), "1/4");
    }

    #[test]
    fn zero_rate_is_unconstrained() {
        let cfg = FairnessConfig::new(2, rate("0"), 100).unwrap();
        assert!(cfg.is_unconstrained());
        assert_eq!(cfg.exploit_mass(), 1.0);
    }

    #[test]
    fn rejects_rate_too_high() {
        assert!(matches!(
            FairnessConfig::new(3, rate("1/2"), 100),
            Err(ConfigError::RateTooHigh { .. })
        ));
        // 2/3 is both too high and non-integral; the rate check wins
        assert!(matches!(
            FairnessConfig::new(2, rate("2/3"), 30),
            Err(ConfigError::RateTooHigh { .. })
        ));
    }

    #[test]
    fn rejects_non_integral_block() {
        assert!(matches!(
            FairnessConfig::new(2, rate("2/5"), 10),
            Err(ConfigError::NonIntegralBlock(_))
        ));
    }

    #[test]
    fn rejects_zero_arms_and_horizon() {
        assert_eq!(
            FairnessConfig::new(0, Rate::ZERO, 10),
            Err(ConfigError::ZeroArms)
        );
        assert_eq!(
            FairnessConfig::new(2, Rate::ZERO, 0),
            Err(ConfigError::ZeroHorizon)
        );
    }

    #[test]
    fn normalizes_equivalent_fractions() {
        assert_eq!(rate("2/8"), rate("1/4"));
        assert_eq!(rate("0.25"), rate("1/4"));
        assert_eq!(rate(".5"), rate("1/2"));
        let cfg = FairnessConfig::new(2, rate("3/9"), 30).unwrap();
        assert_eq!(cfg.block_length(), Some(3));
    }

    #[test]
    fn parse_errors() {
        for bad in ["", "1/0", "-1/4", "abc", "1/x", "0.2.5"] {
            assert!(bad.parse::<Rate>().is_err(), "{bad} should not parse");
        }
    }

    #[test]
    fn kv_equal_one_is_valid() {
        let cfg = FairnessConfig::new(4, rate("1/4"), 10).unwrap();
        assert_eq!(cfg.exploit_mass(), 0.0);
    }

    #[test]
    fn json_shape() {
        let cfg = FairnessConfig::new(2, rate("1/3"), 30).unwrap();
        let json = serde_json::to_string(&cfg).unwrap();
        assert_eq!(json, r#"{"num_arms":2,"min_rate":"1/3","horizon":30}"#);
        let back: FairnessConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cfg);
        assert!(serde_json::from_str::<FairnessConfig>(
            r#"{"num_arms":3,"min_rate":"1/2","horizon":30}"#
        )
        .is_err());
    }
}
