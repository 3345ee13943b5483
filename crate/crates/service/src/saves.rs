//! Named saves, private to a session, optionally persisted as one JSON file.

use std::collections::BTreeMap;
use std::io;
use std::path::PathBuf;
use std::sync::Mutex;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::api::Submission;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SavedWork {
    pub save_id: String,
    pub session_id: String,
    pub name: String,
    pub submission: Submission,
    pub created_at: DateTime<Utc>,
    pub updated_at: DateTime<Utc>,
}

#[derive(Debug, PartialEq, Eq)]
pub enum SaveError {
    NotFound,
    /// Another save of the session has the name.
    NameTaken,
    /// The save changed since the `updatedAt` the client holds.
    Stale,
    Io(String),
}

pub struct SaveStore {
    path: Option<PathBuf>,
    saves: Mutex<BTreeMap<String, SavedWork>>,
}

impl SaveStore {
    pub fn in_memory() -> Self {
        SaveStore { path: None, saves: Mutex::new(BTreeMap::new()) }
    }

    /// Loads `path` if it exists and writes every change back to it.
    pub fn persistent(path: PathBuf) -> io::Result<Self> {
        let saves = match std::fs::read(&path) {
            Ok(bytes) => {
                let list: Vec<SavedWork> = serde_json::from_slice(&bytes).map_err(io::Error::other)?;
                list.into_iter().map(|s| (s.save_id.clone(), s)).collect()
            }
            Err(e) if e.kind() == io::ErrorKind::NotFound => BTreeMap::new(),
            Err(e) => return Err(e),
        };
        Ok(SaveStore { path: Some(path), saves: Mutex::new(saves) })
    }

    fn flush(&self, saves: &BTreeMap<String, SavedWork>) -> Result<(), SaveError> {
        let Some(path) = &self.path else { return Ok(()) };
        let list: Vec<&SavedWork> = saves.values().collect();
        let bytes = serde_json::to_vec_pretty(&list).map_err(|e| SaveError::Io(e.to_string()))?;
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, bytes).and_then(|_| std::fs::rename(&tmp, path)).map_err(|e| SaveError::Io(e.to_string()))
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, BTreeMap<String, SavedWork>> {
        self.saves.lock().unwrap_or_else(|e| e.into_inner())
    }

    /// The session's saves, by name.
    pub fn list(&self, session: &str) -> Vec<SavedWork> {
        let mut out: Vec<SavedWork> = self.lock().values().filter(|s| s.session_id == session).cloned().collect();
        out.sort_by(|a, b| a.name.cmp(&b.name));
        out
    }

    pub fn create(&self, session: &str, name: &str, submission: Submission) -> Result<SavedWork, SaveError> {
        let mut saves = self.lock();
        if saves.values().any(|s| s.session_id == session && s.name == name) {
            return Err(SaveError::NameTaken);
        }
        let now = Utc::now();
        let s = SavedWork {
            save_id: uuid::Uuid::new_v4().to_string(),
            session_id: session.to_string(),
            name: name.to_string(),
            submission,
            created_at: now,
            updated_at: now,
        };
        saves.insert(s.save_id.clone(), s.clone());
        self.flush(&saves)?;
        Ok(s)
    }

    pub fn get(&self, session: &str, id: &str) -> Result<SavedWork, SaveError> {
        self.lock().get(id).filter(|s| s.session_id == session).cloned().ok_or(SaveError::NotFound)
    }

    /// Replaces the submission and, if given, the name. With `expected`
    /// set, fails unless the save was last updated at that instant.
    pub fn update(
        &self,
        session: &str,
        id: &str,
        name: Option<&str>,
        submission: Submission,
        expected: Option<DateTime<Utc>>,
    ) -> Result<SavedWork, SaveError> {
        let mut saves = self.lock();
        let current = saves.get(id).filter(|s| s.session_id == session).ok_or(SaveError::NotFound)?;
        if expected.is_some_and(|t| t != current.updated_at) {
            return Err(SaveError::Stale);
        }
        if let Some(n) = name {
            if saves.values().any(|s| s.session_id == session && s.name == n && s.save_id != id) {
                return Err(SaveError::NameTaken);
            }
        }
        let s = saves.get_mut(id).expect("checked above");
        if let Some(n) = name {
            s.name = n.to_string();
        }
        s.submission = submission;
        // Strictly increasing, so back-to-back updates stay distinguishable.
        let now = Utc::now();
        s.updated_at = if now > s.updated_at { now } else { s.updated_at + chrono::Duration::microseconds(1) };
        let out = s.clone();
        self.flush(&saves)?;
        Ok(out)
    }

    pub fn delete(&self, session: &str, id: &str) -> Result<(), SaveError> {
        let mut saves = self.lock();
        if saves.get(id).is_none_or(|s| s.session_id != session) {
            return Err(SaveError::NotFound);
        }
        saves.remove(id);
        self.flush(&saves)
    }
}
