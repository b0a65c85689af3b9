//! In-memory session table. Each session sits behind its own mutex, so
//! requests for one session serialize while different sessions proceed
//! in parallel.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, RwLock};

use fairbandit_core::DEFAULT_SCORE_NORMALIZER;

use crate::session::{Session, SessionError, SessionParams};

#[derive(Debug, Clone)]
pub struct StoreConfig {
    pub default_normalizer: f64,
    /// Where snapshots are also written, if set.
    pub snapshot_dir: Option<PathBuf>,
}

impl Default for StoreConfig {
    fn default() -> Self {
        Self {
            default_normalizer: DEFAULT_SCORE_NORMALIZER,
            snapshot_dir: None,
        }
    }
}

#[derive(Debug, Default)]
pub struct SessionStore {
    config: StoreConfig,
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
}

impl SessionStore {
    pub fn new(config: StoreConfig) -> Self {
        Self {
            config,
            sessions: RwLock::default(),
        }
    }

    pub fn config(&self) -> &StoreConfig {
        &self.config
    }

    pub fn create(&self, params: &SessionParams) -> Result<String, SessionError> {
        let id = uuid::Uuid::new_v4().simple().to_string();
        let session = Session::create(id.clone(), params, self.config.default_normalizer)?;
        self.insert(session)?;
        Ok(id)
    }

    fn insert(&self, session: Session) -> Result<(), SessionError> {
        let mut map = self.sessions.write().unwrap_or_else(|e| e.into_inner());
        let id = session.id().to_string();
        if map.contains_key(&id) {
            return Err(SessionError::SessionExists(id));
        }
        map.insert(id, Arc::new(Mutex::new(session)));
        Ok(())
    }

    /// Runs `f` with exclusive access to one session.
    pub fn with<T>(
        &self,
        id: &str,
        f: impl FnOnce(&mut Session) -> Result<T, SessionError>,
    ) -> Result<T, SessionError> {
        let entry = self
            .sessions
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .get(id)
            .cloned()
            .ok_or_else(|| SessionError::UnknownSession(id.to_string()))?;
        let mut session = entry.lock().unwrap_or_else(|e| e.into_inner());
        f(&mut session)
    }

    /// Serialized session; also written to `<snapshot_dir>/<id>.json` when
    /// a directory is configured.
    pub fn snapshot(&self, id: &str) -> Result<(String, Option<PathBuf>), SessionError> {
        let blob = self.with(id, |s| Ok(s.to_snapshot()))?;
        let path = match &self.config.snapshot_dir {
            Some(dir) => {
                std::fs::create_dir_all(dir)?;
                let path = dir.join(format!("{id}.json"));
                std::fs::write(&path, &blob)?;
                Some(path)
            }
            None => None,
        };
        Ok((blob, path))
    }

    /// Re-registers a snapshotted session under its original id.
    pub fn restore(&self, blob: &str) -> Result<String, SessionError> {
        let session = Session::from_snapshot(blob)?;
        let id = session.id().to_string();
        self.insert(session)?;
        Ok(id)
    }

    pub fn len(&self) -> usize {
        self.sessions.read().unwrap_or_else(|e| e.into_inner()).len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
