use fairbandit_core::{BanditError, ConfigError, EnvError, PolicyKind, ScheduleError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Bandit(#[from] BanditError),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error("fairness config has {fairness} arms but environment has {env}")]
    ArmCountMismatch { fairness: usize, env: usize },
    #[error("at least one run is required")]
    ZeroRuns,
    #[error("this regret needs a {expected} trace, got {found}")]
    WrongPolicy {
        expected: &'static str,
        found: PolicyKind,
    },
    #[error("no traces to aggregate")]
    EmptyInput,
    #[error("traces disagree on {0}")]
    InconsistentTraces(&'static str),
    #[error("brute-force oracle is limited to T <= {max}, got {horizon}")]
    HorizonTooLarge { horizon: u64, max: u64 },
    #[error("brute-force oracle needs deterministic rewards (arm {0} is random)")]
    NotFixedRewards(usize),
    #[error("malformed export: {0}")]
    Parse(String),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
