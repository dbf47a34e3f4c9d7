//! On-disk state directory.
//!
//! ```text
//! state/
//!   LOCK                     held exclusively by a running server
//!   txlog.jsonl              one TransactionEvent per line
//!   snapshot-{seq}.json      state after applying event `seq`
//!   snapshot-{seq}.hash      lowercase hex snapshot hash of that state
//! ```

use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::ledger::{snapshot_hash, Genesis, LedgerState, TransactionEvent};

pub const LOG_FILE: &str = "txlog.jsonl";
pub const LOCK_FILE: &str = "LOCK";

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("state directory {0} is locked by another process")]
    Locked(PathBuf),
    #[error("corrupt log at seq {seq}: {reason}")]
    CorruptLog { seq: u64, reason: String },
    #[error("snapshot {seq} does not match its hash file")]
    SnapshotMismatch { seq: u64 },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Reads `txlog.jsonl`. A missing file is an empty log.
pub fn read_log(dir: &Path) -> Result<Vec<TransactionEvent>, StoreError> {
    let file = match File::open(dir.join(LOG_FILE)) {
        Ok(f) => f,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(e.into()),
    };
    let mut events = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        let expected = i as u64;
        let event: TransactionEvent = serde_json::from_str(&line).map_err(|e| StoreError::CorruptLog {
            seq: expected,
            reason: e.to_string(),
        })?;
        if event.seq != expected {
            return Err(StoreError::CorruptLog {
                seq: event.seq,
                reason: format!("expected seq {expected}"),
            });
        }
        events.push(event);
    }
    Ok(events)
}

/// Snapshot sequence numbers present in `dir`, ascending.
pub fn list_snapshots(dir: &Path) -> io::Result<Vec<u64>> {
    let mut seqs = Vec::new();
    for entry in fs::read_dir(dir)? {
        let name = entry?.file_name();
        let name = name.to_string_lossy();
        if let Some(seq) = name
            .strip_prefix("snapshot-")
            .and_then(|n| n.strip_suffix(".hash"))
            .and_then(|n| n.parse().ok())
        {
            seqs.push(seq);
        }
    }
    seqs.sort_unstable();
    Ok(seqs)
}

pub fn read_snapshot_hash(dir: &Path, seq: u64) -> io::Result<String> {
    Ok(fs::read_to_string(dir.join(format!("snapshot-{seq}.hash")))?
        .trim()
        .to_owned())
}

/// Loads snapshot `seq` and checks it against its hash file.
pub fn read_snapshot(dir: &Path, seq: u64) -> Result<LedgerState, StoreError> {
    let json = fs::read_to_string(dir.join(format!("snapshot-{seq}.json")))?;
    let state: LedgerState =
        serde_json::from_str(&json).map_err(|_| StoreError::SnapshotMismatch { seq })?;
    if snapshot_hash(&state).to_hex() != read_snapshot_hash(dir, seq)? {
        return Err(StoreError::SnapshotMismatch { seq });
    }
    Ok(state)
}

/// Latest state recorded in `dir`: newest valid snapshot plus the log tail
/// after it. Returns the state and the tail events.
pub fn load_state(dir: &Path, genesis: &Genesis) -> Result<(LedgerState, Vec<TransactionEvent>), StoreError> {
    let log = read_log(dir)?;
    let snapshots = if dir.exists() { list_snapshots(dir)? } else { Vec::new() };
    for &seq in snapshots.iter().rev() {
        if seq >= log.len() as u64 {
            continue;
        }
        if let Ok(state) = read_snapshot(dir, seq) {
            if state.next_seq() == seq + 1 {
                let tail = log[(seq + 1) as usize..].to_vec();
                return Ok((state, tail));
            }
        }
    }
    Ok((LedgerState::genesis(genesis), log))
}

/// Exclusive handle on a state directory.
#[derive(Debug)]
pub struct StateDir {
    path: PathBuf,
    _lock: File,
    log: File,
}

impl StateDir {
    pub fn open(path: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let path = path.into();
        fs::create_dir_all(&path)?;
        let lock = OpenOptions::new()
            .create(true)
            .truncate(false)
            .write(true)
            .open(path.join(LOCK_FILE))?;
        match lock.try_lock() {
            Ok(()) => {}
            Err(fs::TryLockError::WouldBlock) => return Err(StoreError::Locked(path)),
            Err(fs::TryLockError::Error(e)) => return Err(e.into()),
        }
        let log = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path.join(LOG_FILE))?;
        Ok(StateDir {
            path,
            _lock: lock,
            log,
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(&mut self, event: &TransactionEvent) -> io::Result<()> {
        let mut line = serde_json::to_vec(event).map_err(io::Error::other)?;
        line.push(b'\n');
        self.log.write_all(&line)?;
        self.log.sync_data()
    }

    /// Writes `snapshot-{seq}.json` and `.hash` for the last applied event.
    /// Does nothing for a state with no events.
    pub fn write_snapshot(&self, state: &LedgerState) -> io::Result<Option<u64>> {
        let Some(seq) = state.next_seq().checked_sub(1) else {
            return Ok(None);
        };
        let json = serde_json::to_vec(state).map_err(io::Error::other)?;
        write_atomic(&self.path.join(format!("snapshot-{seq}.json")), &json)?;
        write_atomic(
            &self.path.join(format!("snapshot-{seq}.hash")),
            format!("{}\n", snapshot_hash(state).to_hex()).as_bytes(),
        )?;
        Ok(Some(seq))
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(tmp, path)
}
