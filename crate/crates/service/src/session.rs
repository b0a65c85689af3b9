//! One live allocation session: players are arms, a turn is one round.
//!
//! The pending decision is computed as soon as the previous round closes, so
//! repeated `next_turn` calls see the same player and stochastic sessions
//! never re-draw.

use fairbandit_core::{
    teammate_reward, Allocator, ArmId, BanditError, Channel, ConfigError, Decision, EnvError,
    FairnessConfig, PolicyKind, Provenance, Rate, Schedule, StreamRng, TeammateScore,
    DEFAULT_SCORE_NORMALIZER,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("no session with id {0}")]
    UnknownSession(String),
    #[error("session already has all {horizon} rounds")]
    SessionFinished { horizon: u64 },
    #[error("player {got} reported but player {expected} holds the turn")]
    WrongPlayer { expected: usize, got: usize },
    #[error("points must be nonnegative, got {0}")]
    NegativePoints(f64),
    #[error("points must be finite")]
    NonFinitePoints,
    #[error("score normalizer must be positive and finite, got {0}")]
    InvalidNormalizer(f64),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0} policy is not offered by the service")]
    UnsupportedPolicy(PolicyKind),
    #[error("corrupt snapshot: {0}")]
    CorruptSnapshot(String),
    #[error("session {0} already exists")]
    SessionExists(String),
    #[error(transparent)]
    Bandit(#[from] BanditError),
    #[error(transparent)]
    Reward(#[from] EnvError),
    #[error("snapshot i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl SessionError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Self::UnknownSession(_) => "unknown_session",
            Self::SessionFinished { .. } => "session_finished",
            Self::WrongPlayer { .. } => "wrong_player",
            Self::NegativePoints(_) => "negative_points",
            Self::NonFinitePoints => "invalid_points",
            Self::InvalidNormalizer(_) => "invalid_normalizer",
            Self::Config(ConfigError::RateTooHigh { .. }) => "rate_too_high",
            Self::Config(_) => "invalid_config",
            Self::UnsupportedPolicy(_) => "unsupported_policy",
            Self::CorruptSnapshot(_) => "corrupt_snapshot",
            Self::SessionExists(_) => "session_exists",
            Self::Bandit(_) | Self::Reward(_) => "internal",
            Self::Io(_) => "io",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SessionStatus {
    Waiting,
    Active,
    Finished,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionParams {
    pub players: usize,
    pub rate: Rate,
    pub horizon: u64,
    pub policy: PolicyKind,
    #[serde(default)]
    pub seed: u64,
    /// `M` in the reward; the store default when absent.
    #[serde(default)]
    pub normalizer: Option<f64>,
}

/// A closed round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    /// 0-based.
    pub round: u64,
    pub player: ArmId,
    pub provenance: Provenance,
    pub points: f64,
    /// `S_p / (M n_p)` after this round, as fed to the bandit.
    pub reward: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Turn {
    pub player: ArmId,
    /// Rounds already played, so the first turn is round 0.
    pub round: u64,
    pub provenance: Provenance,
}

/// Everything a client needs to render the session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionView {
    pub session_id: String,
    pub status: SessionStatus,
    pub policy: PolicyKind,
    pub config: FairnessConfig,
    pub schedule: Option<Schedule>,
    pub normalizer: f64,
    pub round: u64,
    pub pending_player: Option<ArmId>,
    pub scores: Vec<f64>,
    pub turn_counts: Vec<u64>,
    pub pull_fractions: Vec<f64>,
    pub history: Vec<RoundRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    id: String,
    status: SessionStatus,
    normalizer: f64,
    allocator: Allocator,
    scores: Vec<f64>,
    pending: Option<Decision>,
    history: Vec<RoundRecord>,
}

/// Policy randomness stream for a session seed. Driving an [`Allocator`]
/// built on this stream with the same rewards reproduces the session.
pub fn session_rng(seed: u64) -> StreamRng {
    StreamRng::for_episode(seed, 0, Channel::Policy)
}

impl Session {
    pub fn create(
        id: String,
        params: &SessionParams,
        default_normalizer: f64,
    ) -> Result<Self, SessionError> {
        if params.policy == PolicyKind::Unconstrained {
            return Err(SessionError::UnsupportedPolicy(params.policy));
        }
        let normalizer = params.normalizer.unwrap_or(default_normalizer);
        if !(normalizer > 0.0 && normalizer.is_finite()) {
            return Err(SessionError::InvalidNormalizer(normalizer));
        }
        let config = FairnessConfig::new(params.players, params.rate, params.horizon)?;
        let allocator = Allocator::new(params.policy, config, None, session_rng(params.seed))?;
        let mut s = Self {
            id,
            status: SessionStatus::Waiting,
            normalizer,
            allocator,
            scores: vec![0.0; params.players],
            pending: None,
            history: Vec::new(),
        };
        s.pending = Some(s.allocator.decide()?);
        Ok(s)
    }

    pub fn with_defaults(id: String, params: &SessionParams) -> Result<Self, SessionError> {
        Self::create(id, params, DEFAULT_SCORE_NORMALIZER)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn status(&self) -> SessionStatus {
        self.status
    }

    pub fn round(&self) -> u64 {
        self.allocator.state().clock()
    }

    pub fn allocator(&self) -> &Allocator {
        &self.allocator
    }

    pub fn history(&self) -> &[RoundRecord] {
        &self.history
    }

    fn horizon_error(&self) -> SessionError {
        SessionError::SessionFinished {
            horizon: self.allocator.config().horizon(),
        }
    }

    /// The pending decision; idempotent until a score is reported.
    pub fn next_turn(&mut self) -> Result<Turn, SessionError> {
        let pending = self.pending.ok_or_else(|| self.horizon_error())?;
        if self.status == SessionStatus::Waiting {
            self.status = SessionStatus::Active;
        }
        Ok(Turn {
            player: pending.arm,
            round: self.round(),
            provenance: pending.provenance,
        })
    }

    pub fn report_score(&mut self, player: ArmId, points: f64) -> Result<SessionView, SessionError> {
        let pending = self.pending.ok_or_else(|| self.horizon_error())?;
        if player != pending.arm {
            return Err(SessionError::WrongPlayer {
                expected: pending.arm.number(),
                got: player.number(),
            });
        }
        if points.is_nan() || points.is_infinite() {
            return Err(SessionError::NonFinitePoints);
        }
        if points < 0.0 {
            return Err(SessionError::NegativePoints(points));
        }
        let p = player.index();
        let score = TeammateScore {
            cumulative_score: self.scores[p] + points,
            turns: self.allocator.state().arm(player)?.pull_count + 1,
            normalizer: self.normalizer,
        };
        let reward = teammate_reward(&score)?;
        let round = self.round();
        self.allocator.observe(&pending, reward)?;
        self.scores[p] = score.cumulative_score;
        self.history.push(RoundRecord {
            round,
            player,
            provenance: pending.provenance,
            points,
            reward,
        });
        if self.allocator.is_finished() {
            self.pending = None;
            self.status = SessionStatus::Finished;
        } else {
            self.pending = Some(self.allocator.decide()?);
            self.status = SessionStatus::Active;
        }
        Ok(self.view())
    }

    pub fn view(&self) -> SessionView {
        let counts = self.allocator.state().pull_counts();
        let round = self.round();
        SessionView {
            session_id: self.id.clone(),
            status: self.status,
            policy: self.allocator.policy(),
            config: *self.allocator.config(),
            schedule: self.allocator.schedule().cloned(),
            normalizer: self.normalizer,
            round,
            pending_player: self.pending.map(|d| d.arm),
            scores: self.scores.clone(),
            pull_fractions: counts
                .iter()
                .map(|&n| if round == 0 { 0.0 } else { n as f64 / round as f64 })
                .collect(),
            turn_counts: counts,
            history: self.history.clone(),
        }
    }

    pub fn to_snapshot(&self) -> String {
        serde_json::to_string(self).expect("session serializes")
    }

    /// Parses and cross-checks a snapshot produced by [`Session::to_snapshot`].
    pub fn from_snapshot(blob: &str) -> Result<Self, SessionError> {
        let s: Session =
            serde_json::from_str(blob).map_err(|e| SessionError::CorruptSnapshot(e.to_string()))?;
        s.check().map_err(|e| SessionError::CorruptSnapshot(e.into()))?;
        Ok(s)
    }

    fn check(&self) -> Result<(), &'static str> {
        let k = self.allocator.config().num_arms();
        let round = self.round();
        if self.scores.len() != k {
            return Err("score vector length differs from player count");
        }
        if self.history.len() as u64 != round {
            return Err("history length differs from round counter");
        }
        if !(self.normalizer > 0.0 && self.normalizer.is_finite()) {
            return Err("bad normalizer");
        }
        let mut counts = vec![0u64; k];
        for (i, r) in self.history.iter().enumerate() {
            if r.round != i as u64 || r.player.index() >= k {
                return Err("history out of order");
            }
            counts[r.player.index()] += 1;
        }
        if counts != self.allocator.state().pull_counts() {
            return Err("turn counts disagree with history");
        }
        let finished = self.allocator.is_finished();
        match (self.status, self.pending, finished) {
            (SessionStatus::Finished, None, true) => {}
            (SessionStatus::Waiting, Some(_), false) if round == 0 => {}
            (SessionStatus::Active, Some(_), false) => {}
            _ => return Err("status inconsistent with round counter"),
        }
        if let Some(d) = self.pending {
            if d.arm.index() >= k {
                return Err("pending player out of range");
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(players: usize, rate: &str, horizon: u64, policy: PolicyKind) -> SessionParams {
        SessionParams {
            players,
            rate: rate.parse().unwrap(),
            horizon,
            policy,
            seed: 11,
            normalizer: None,
        }
    }

    fn session(rate: &str, policy: PolicyKind) -> Session {
        Session::with_defaults("s".into(), &params(2, rate, 30, policy)).unwrap()
    }

    fn play_all(s: &mut Session, points: impl Fn(u64, ArmId) -> f64) {
        while s.status() != SessionStatus::Finished {
            let t = s.next_turn().unwrap();
            s.report_score(t.player, points(t.round, t.player)).unwrap();
        }
    }

    #[test]
    fn init_turns_go_to_players_in_order() {
        let mut s = session("1/3", PolicyKind::Strict);
        assert_eq!(s.status(), SessionStatus::Waiting);
        let t0 = s.next_turn().unwrap();
        assert_eq!((t0.player.number(), t0.round, t0.provenance), (1, 0, Provenance::Init));
        assert_eq!(s.next_turn().unwrap(), t0);
        assert_eq!(s.status(), SessionStatus::Active);
        s.report_score(t0.player, 10.0).unwrap();
        assert_eq!(s.next_turn().unwrap().player.number(), 2);
    }

    #[test]
    fn first_turn_full_score_gives_unit_reward() {
        let mut s = session("1/3", PolicyKind::Strict);
        let v = s.report_score(ArmId::from_index(0), 300.0).unwrap();
        assert_eq!(v.history[0].reward, 1.0);
        assert_eq!(s.allocator().state().arms()[0].reward_sum, 1.0);
    }

    #[test]
    fn reward_uses_cumulative_average() {
        let mut s = session("1/2", PolicyKind::Strict);
        s.report_score(ArmId::from_index(0), 150.0).unwrap();
        s.report_score(ArmId::from_index(1), 0.0).unwrap();
        let v = s.report_score(ArmId::from_index(0), 0.0).unwrap();
        assert_eq!(v.history[2].reward, 0.25);
        assert_eq!(v.history[1].reward, 0.0);
    }

    #[test]
    fn rejects_bad_reports() {
        let mut s = session("1/3", PolicyKind::Strict);
        assert!(matches!(
            s.report_score(ArmId::from_index(1), 1.0),
            Err(SessionError::WrongPlayer { expected: 1, got: 2 })
        ));
        assert!(matches!(
            s.report_score(ArmId::from_index(0), -1.0),
            Err(SessionError::NegativePoints(_))
        ));
        assert!(matches!(
            s.report_score(ArmId::from_index(0), f64::NAN),
            Err(SessionError::NonFinitePoints)
        ));
        assert_eq!(s.round(), 0);
    }

    #[test]
    fn rate_too_high() {
        let err = Session::with_defaults("x".into(), &params(2, "2/3", 30, PolicyKind::Strict));
        assert_eq!(err.unwrap_err().code(), "rate_too_high");
    }

    #[test]
    fn half_rate_alternates_and_finishes() {
        let mut s = session("1/2", PolicyKind::Strict);
        play_all(&mut s, |r, _| (r * 37 % 300) as f64);
        let v = s.view();
        assert_eq!(v.turn_counts, vec![15, 15]);
        assert_eq!(v.status, SessionStatus::Finished);
        assert!(v.pending_player.is_none());
        assert!(matches!(s.next_turn(), Err(SessionError::SessionFinished { horizon: 30 })));
        assert!(matches!(
            s.report_score(ArmId::from_index(0), 1.0),
            Err(SessionError::SessionFinished { .. })
        ));
    }

    #[test]
    fn third_rate_floor_holds() {
        for policy_seed in 0..50u64 {
            let mut p = params(2, "1/3", 30, PolicyKind::Strict);
            p.seed = policy_seed;
            let mut s = Session::with_defaults("f".into(), &p).unwrap();
            // player 1 scores far better, so UCB favors them
            play_all(&mut s, |r, pl| if pl.index() == 0 { 280.0 } else { (r % 3) as f64 });
            assert!(s.view().turn_counts.iter().all(|&n| n >= 10));
        }
    }

    #[test]
    fn fresh_view_is_zeroed() {
        let s = session("1/4", PolicyKind::Stochastic);
        let v = s.view();
        assert_eq!(v.round, 0);
        assert_eq!(v.scores, vec![0.0, 0.0]);
        assert_eq!(v.turn_counts, vec![0, 0]);
        assert_eq!(v.pull_fractions, vec![0.0, 0.0]);
        assert_eq!(v.pending_player, Some(ArmId::from_index(0)));
    }

    #[test]
    fn snapshot_round_trip_continues_identically() {
        let points = |r: u64, p: ArmId| ((r * 53 + p.index() as u64 * 101) % 300) as f64;
        for policy in [PolicyKind::Strict, PolicyKind::Stochastic] {
            let mut full = session("1/4", policy);
            for _ in 0..15 {
                let t = full.next_turn().unwrap();
                full.report_score(t.player, points(t.round, t.player)).unwrap();
            }
            let mut restored = Session::from_snapshot(&full.to_snapshot()).unwrap();
            assert_eq!(restored, full);
            assert_eq!(restored.next_turn().unwrap(), full.next_turn().unwrap());
            play_all(&mut full, points);
            play_all(&mut restored, points);
            assert_eq!(restored.view(), full.view());
        }
    }

    #[test]
    fn corrupt_snapshots_are_rejected() {
        let mut s = session("1/3", PolicyKind::Strict);
        s.report_score(ArmId::from_index(0), 5.0).unwrap();
        let blob = s.to_snapshot();
        let truncated = &blob[..blob.len() / 2];
        assert!(matches!(Session::from_snapshot(truncated), Err(SessionError::CorruptSnapshot(_))));
        let mut v: serde_json::Value = serde_json::from_str(&blob).unwrap();
        v["history"] = serde_json::json!([]);
        assert!(matches!(
            Session::from_snapshot(&v.to_string()),
            Err(SessionError::CorruptSnapshot(_))
        ));
    }

    #[test]
    fn unconstrained_sessions_are_refused() {
        let err = Session::with_defaults("u".into(), &params(2, "0", 30, PolicyKind::Unconstrained));
        assert!(matches!(err, Err(SessionError::UnsupportedPolicy(_))));
    }
}
