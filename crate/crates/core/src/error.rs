use thiserror::Error;

use crate::arm::ArmId;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BanditError {
    #[error("arm {0} has never been pulled")]
    ArmNeverPulled(ArmId),
    #[error("arm {arm} out of range for {num_arms} arms")]
    ArmOutOfRange { arm: ArmId, num_arms: usize },
    #[error("horizon of {horizon} steps already reached")]
    HorizonExceeded { horizon: u64 },
    #[error("reward {0} outside [0, 1]")]
    RewardOutOfRange(f64),
    #[error("strict policy with v > 0 needs a schedule")]
    MissingSchedule,
    #[error("schedule does not match the configuration")]
    ScheduleMismatch,
    #[error("state has {state} arms but configuration has {config}")]
    ArmCountMismatch { state: usize, config: usize },
}
