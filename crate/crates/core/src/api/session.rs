//! Bearer sessions standing in for a wallet connection.

use std::collections::HashMap;
use std::sync::Mutex;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::Serialize;

use super::error::ApiError;
use crate::ledger::AccountId;

pub const DEFAULT_TTL: Duration = Duration::from_secs(24 * 60 * 60);

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Session {
    pub account: AccountId,
    pub token: String,
    /// Unix seconds.
    pub issued_at: u64,
    pub expires_at: u64,
}

fn now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

/// 32 bytes from the operating system's secure source, hex encoded.
fn fresh_token() -> String {
    let mut bytes = [0u8; 32];
    getrandom::fill(&mut bytes).expect("operating system randomness unavailable");
    hex::encode(bytes)
}

#[derive(Debug)]
pub struct SessionStore {
    ttl: Duration,
    sessions: Mutex<HashMap<String, Session>>,
}

impl SessionStore {
    pub fn new(ttl: Duration) -> Self {
        SessionStore {
            ttl,
            sessions: Mutex::new(HashMap::new()),
        }
    }

    pub fn issue(&self, account: AccountId) -> Session {
        let issued_at = now();
        let session = Session {
            account,
            token: fresh_token(),
            issued_at,
            expires_at: issued_at + self.ttl.as_secs(),
        };
        self.sessions
            .lock()
            .expect("session lock")
            .insert(session.token.clone(), session.clone());
        session
    }

    pub fn resolve(&self, token: &str) -> Result<Session, ApiError> {
        let mut sessions = self.sessions.lock().expect("session lock");
        let session = sessions
            .get(token)
            .ok_or_else(|| ApiError::unauthorized("InvalidSession", "unknown bearer token"))?;
        if now() >= session.expires_at {
            sessions.remove(token);
            return Err(ApiError::unauthorized("SessionExpired", "session expired, log in again"));
        }
        Ok(session.clone())
    }
}
