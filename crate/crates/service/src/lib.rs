//! Live turn allocation over HTTP/JSON. Players are arms, each round is one
//! turn, and a player's reward is their normalized average score so far.

pub mod http;
pub mod session;
pub mod store;

pub use http::{router, ScoreReport, SnapshotResponse};
pub use session::{
    session_rng, RoundRecord, Session, SessionError, SessionParams, SessionStatus, SessionView,
    Turn,
};
pub use store::{SessionStore, StoreConfig};
