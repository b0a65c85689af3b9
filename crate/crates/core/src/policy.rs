//! The two rate-constrained selection rules and the unconstrained baseline.
//!
//! All three share the initialization phase: step `t <= K` pulls arm `t`.

use rand::Rng;

use crate::arm::ArmId;
use crate::config::FairnessConfig;
use crate::decision::{Decision, Provenance};
use crate::error::BanditError;
use crate::schedule::Schedule;
use crate::state::BanditState;

fn next_step(state: &BanditState, cfg: &FairnessConfig) -> Result<u64, BanditError> {
    if state.num_arms() != cfg.num_arms() {
        return Err(BanditError::ArmCountMismatch {
            state: state.num_arms(),
            config: cfg.num_arms(),
        });
    }
    if state.clock() >= cfg.horizon() {
        return Err(BanditError::HorizonExceeded {
            horizon: cfg.horizon(),
        });
    }
    Ok(state.clock() + 1)
}

fn init_decision(step: u64, cfg: &FairnessConfig) -> Option<Decision> {
    (step <= cfg.num_arms() as u64).then(|| Decision::init(ArmId::from_index(step as usize - 1)))
}

/// Plain UCB: argmax of the index after the initialization steps.
pub fn select_unconstrained(
    state: &BanditState,
    cfg: &FairnessConfig,
) -> Result<Decision, BanditError> {
    let step = next_step(state, cfg)?;
    if let Some(d) = init_decision(step, cfg) {
        return Ok(d);
    }
    let argmax = state.ucb_argmax(cfg.horizon())?;
    Ok(Decision {
        arm: argmax,
        provenance: Provenance::UcbArgmax,
        ucb_argmax_arm: Some(argmax),
    })
}

/// Strictly-rate-constrained UCB.
///
/// Reserved offsets of each block go to their assigned arm; every other
/// post-initialization step takes the UCB argmax. With `v = 0` there are no
/// blocks and `schedule` is ignored.
pub fn select_strict(
    state: &BanditState,
    cfg: &FairnessConfig,
    schedule: Option<&Schedule>,
) -> Result<Decision, BanditError> {
    let step = next_step(state, cfg)?;
    if let Some(d) = init_decision(step, cfg) {
        return Ok(d);
    }
    let Some(block_length) = cfg.block_length() else {
        return select_unconstrained(state, cfg);
    };
    let schedule = schedule.ok_or(BanditError::MissingSchedule)?;
    if schedule.block_length() != block_length || schedule.num_arms() != cfg.num_arms() {
        return Err(BanditError::ScheduleMismatch);
    }
    let argmax = state.ucb_argmax(cfg.horizon())?;
    Ok(match schedule.prescheduled_arm(step) {
        Some(arm) => Decision {
            arm,
            provenance: Provenance::Prescheduled,
            ucb_argmax_arm: Some(argmax),
        },
        None => Decision {
            arm: argmax,
            provenance: Provenance::UcbArgmax,
            ucb_argmax_arm: Some(argmax),
        },
    })
}

/// Stochastic-rate-constrained UCB: with probability `1 - K*v` the UCB
/// argmax, otherwise an arm drawn uniformly from all `K`.
///
/// Consumes exactly one uniform from `rng` per post-initialization step, plus
/// one more when the uniform branch is taken.
pub fn select_stochastic<R: Rng + ?Sized>(
    state: &BanditState,
    cfg: &FairnessConfig,
    rng: &mut R,
) -> Result<Decision, BanditError> {
    let step = next_step(state, cfg)?;
    if let Some(d) = init_decision(step, cfg) {
        return Ok(d);
    }
    let argmax = state.ucb_argmax(cfg.horizon())?;
    let u: f64 = rng.random();
    if u < cfg.exploit_mass() {
        Ok(Decision {
            arm: argmax,
            provenance: Provenance::UcbArgmax,
            ucb_argmax_arm: Some(argmax),
        })
    } else {
        let arm = ArmId::from_index(rng.random_range(0..cfg.num_arms()));
        Ok(Decision {
            arm,
            provenance: Provenance::UniformDraw,
            ucb_argmax_arm: Some(argmax),
        })
    }
}

/// Guaranteed per-arm pull count after `t` completed steps of the strict
/// policy: `floor((t - K) * v) + 1` once the initialization is done, else 0.
///
/// Each completed block gives every arm exactly one reserved pull, on top of
/// its initialization pull.
pub fn min_pull_lower_bound(t: u64, cfg: &FairnessConfig) -> u64 {
    let k = cfg.num_arms() as u64;
    if t < k {
        return 0;
    }
    match cfg.block_length() {
        Some(d) => (t - k) / d + 1,
        None => 1,
    }
}
