//! Multi-armed bandits with a minimum pull rate per arm.
//!
//! Two UCB variants keep every arm selected at rate at least `v`:
//!
//! * the **strict** policy reserves `K` slots in every block of `1/v` steps,
//!   one per arm, and runs UCB in the remaining slots, so the rate holds at
//!   every step up to a `K/t` slack;
//! * the **stochastic** policy pulls the UCB argmax with probability
//!   `1 - K*v` and a uniformly random arm otherwise, so the rate holds in
//!   expectation.
//!
//! The UCB index is `mean(i) + 2*sqrt(ln T / n(i))` where `mean(i)` is the
//! per-arm empirical mean (sum of arm `i`'s rewards over its pull count).
//! Argmax ties go to the lowest arm.

pub mod allocator;
pub mod arm;
pub mod config;
pub mod decision;
pub mod env;
pub mod error;
pub mod mixture;
pub mod policy;
pub mod rng;
pub mod schedule;
pub mod state;

pub use allocator::Allocator;
pub use arm::ArmId;
pub use config::{ConfigError, FairnessConfig, Rate};
pub use decision::{Decision, PolicyKind, Provenance, SlotClass};
pub use env::{
    teammate_reward, ArmDistribution, EnvError, EnvSpec, TeammateScore, DEFAULT_SCORE_NORMALIZER,
};
pub use error::BanditError;
pub use mixture::{mixture_of, MixtureDistribution};
pub use policy::{min_pull_lower_bound, select_stochastic, select_strict, select_unconstrained};
pub use rng::{mix_seeds, Channel, StreamRng};
pub use schedule::{count_schedules, enumerate_schedules, Schedule, ScheduleError, Schedules};
pub use state::{ucb_value, ArmStats, BanditState, EXPLORATION_COEFFICIENT};
