//! Directory of mission records, one `<id>.mission.json` per mission.
//!
//! Writes go to a temp file that is renamed into place. Updates are
//! compare-and-swap on the `updated` timestamp, serialized per mission by an
//! exclusive `<id>.lock` file.

use std::collections::HashSet;
use std::fs::{self, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant, SystemTime};

use onto4mat::intent::{MissionBrief, MissionPlan, MissionStatus};
use onto4mat::sim::{SimConfig, RNG_ID};
use serde::{Deserialize, Serialize};
use thiserror::Error;
use time::format_description::well_known::Rfc3339;
use time::OffsetDateTime;

const RECORD_SUFFIX: &str = ".mission.json";
const LOCK_WAIT: Duration = Duration::from_secs(2);
const STALE_LOCK: Duration = Duration::from_secs(30);
pub const RESTART_NOTE: &str = "process restarted while running; marked failed";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MissionRecord {
    pub plan: MissionPlan,
    pub brief: MissionBrief,
    pub config: SimConfig,
    pub trajectory_path: Option<PathBuf>,
    pub rng: String,
    pub created: String,
    pub updated: String,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl MissionRecord {
    pub fn new(plan: MissionPlan, brief: MissionBrief, config: SimConfig) -> MissionRecord {
        let now = now();
        MissionRecord {
            plan,
            brief,
            config,
            trajectory_path: None,
            rng: RNG_ID.to_string(),
            created: now.clone(),
            updated: now,
            notes: Vec::new(),
        }
    }

    pub fn id(&self) -> &str {
        &self.plan.id
    }

    pub fn status(&self) -> MissionStatus {
        self.plan.status
    }
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("mission `{0}` not found")]
    NotFound(String),
    #[error("mission `{id}` violates the record schema: {reason}")]
    SchemaViolation { id: String, reason: String },
    #[error("mission `{0}` was modified concurrently")]
    ConcurrentModification(String),
    #[error("mission `{0}` already exists")]
    AlreadyExists(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub fn now() -> String {
    OffsetDateTime::now_utc().format(&Rfc3339).expect("rfc3339 formats")
}

/// A timestamp strictly after `prev`.
fn next_stamp(prev: &str) -> String {
    let now = OffsetDateTime::now_utc();
    let t = match OffsetDateTime::parse(prev, &Rfc3339) {
        Ok(p) if p >= now => p + time::Duration::nanoseconds(1),
        _ => now,
    };
    t.format(&Rfc3339).expect("rfc3339 formats")
}

fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}

/// Handle on a store directory. Clones share the set of runs live in this process.
#[derive(Debug, Clone)]
pub struct Store {
    dir: PathBuf,
    live: Arc<Mutex<HashSet<String>>>,
}

struct LockGuard(PathBuf);

impl Drop for LockGuard {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.0);
    }
}

impl Store {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Store, StoreError> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Store {
            dir,
            live: Arc::default(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, id: &str) -> PathBuf {
        self.dir.join(format!("{id}{RECORD_SUFFIX}"))
    }

    pub fn trajectory_path(&self, id: &str) -> PathBuf {
        self.dir.join(format!("{id}.trajectory.jsonl"))
    }

    /// Marks a run as executing in this process, so `load` does not treat
    /// its `running` status as left over from a crash.
    pub fn set_live(&self, id: &str, live: bool) {
        let mut set = self.live.lock().expect("live set");
        if live {
            set.insert(id.to_string());
        } else {
            set.remove(id);
        }
    }

    fn is_live(&self, id: &str) -> bool {
        self.live.lock().expect("live set").contains(id)
    }

    fn write_atomic(&self, id: &str, rec: &MissionRecord) -> Result<PathBuf, StoreError> {
        let path = self.path(id);
        let tmp = self.dir.join(format!(".{id}.{}.tmp", std::process::id()));
        let mut f = fs::File::create(&tmp)?;
        f.write_all(serde_json::to_string_pretty(rec).expect("record serializes").as_bytes())?;
        f.write_all(b"\n")?;
        f.sync_all()?;
        fs::rename(&tmp, &path)?;
        Ok(path)
    }

    fn lock(&self, id: &str) -> Result<LockGuard, StoreError> {
        let path = self.dir.join(format!("{id}.lock"));
        let start = Instant::now();
        loop {
            match OpenOptions::new().write(true).create_new(true).open(&path) {
                Ok(_) => return Ok(LockGuard(path)),
                Err(e) if e.kind() == io::ErrorKind::AlreadyExists => {
                    let stale = fs::metadata(&path)
                        .and_then(|m| m.modified())
                        .map(|t| SystemTime::now().duration_since(t).unwrap_or_default() > STALE_LOCK)
                        .unwrap_or(false);
                    if stale {
                        let _ = fs::remove_file(&path);
                    } else if start.elapsed() > LOCK_WAIT {
                        return Err(StoreError::ConcurrentModification(id.to_string()));
                    } else {
                        std::thread::sleep(Duration::from_millis(2));
                    }
                }
                Err(e) => return Err(e.into()),
            }
        }
    }

    /// Writes a new record; fails if the id is taken.
    pub fn create(&self, rec: &MissionRecord) -> Result<PathBuf, StoreError> {
        let id = rec.id();
        check_schema(rec, id)?;
        let _guard = self.lock(id)?;
        if self.path(id).exists() {
            return Err(StoreError::AlreadyExists(id.to_string()));
        }
        self.write_atomic(id, rec)
    }

    fn read(&self, id: &str) -> Result<MissionRecord, StoreError> {
        if !valid_id(id) {
            return Err(StoreError::NotFound(id.to_string()));
        }
        let text = match fs::read_to_string(self.path(id)) {
            Ok(t) => t,
            Err(e) if e.kind() == io::ErrorKind::NotFound => {
                return Err(StoreError::NotFound(id.to_string()))
            }
            Err(e) => return Err(e.into()),
        };
        let rec: MissionRecord = serde_json::from_str(&text).map_err(|e| StoreError::SchemaViolation {
            id: id.to_string(),
            reason: e.to_string(),
        })?;
        check_schema(&rec, id)?;
        Ok(rec)
    }

    /// Loads and validates a record. A `running` record with no trajectory
    /// that is not live in this process is normalized to `failed`.
    pub fn load(&self, id: &str) -> Result<MissionRecord, StoreError> {
        let rec = self.read(id)?;
        if rec.status() == MissionStatus::Running && rec.trajectory_path.is_none() && !self.is_live(id) {
            let _guard = self.lock(id)?;
            let mut rec = self.read(id)?;
            if rec.status() == MissionStatus::Running && rec.trajectory_path.is_none() {
                rec.plan.status = MissionStatus::Failed;
                rec.notes.push(RESTART_NOTE.to_string());
                rec.updated = next_stamp(&rec.updated);
                self.write_atomic(id, &rec)?;
            }
            return Ok(rec);
        }
        Ok(rec)
    }

    /// Replaces the record if its stored `updated` still equals
    /// `rec.updated`. Returns the written record with a fresh timestamp.
    pub fn update(&self, rec: &MissionRecord) -> Result<MissionRecord, StoreError> {
        let id = rec.id();
        let _guard = self.lock(id)?;
        let current = self.read(id)?;
        if current.updated != rec.updated {
            return Err(StoreError::ConcurrentModification(id.to_string()));
        }
        let mut next = rec.clone();
        next.updated = next_stamp(&current.updated);
        check_schema(&next, id)?;
        self.write_atomic(id, &next)?;
        Ok(next)
    }

    /// Ids of all records in the directory, sorted.
    pub fn list(&self) -> Result<Vec<String>, StoreError> {
        let mut ids = Vec::new();
        for entry in fs::read_dir(&self.dir)? {
            let name = entry?.file_name();
            if let Some(id) = name.to_str().and_then(|n| n.strip_suffix(RECORD_SUFFIX)) {
                ids.push(id.to_string());
            }
        }
        ids.sort();
        Ok(ids)
    }
}

fn check_schema(rec: &MissionRecord, id: &str) -> Result<(), StoreError> {
    let fail = |reason: String| {
        Err(StoreError::SchemaViolation {
            id: id.to_string(),
            reason,
        })
    };
    if !valid_id(id) || rec.plan.id != id {
        return fail(format!("plan id `{}` does not match record id", rec.plan.id));
    }
    if rec.brief.plan_id != rec.plan.id {
        return fail("brief belongs to another plan".into());
    }
    if rec.rng != RNG_ID {
        return fail(format!("unknown rng `{}`", rec.rng));
    }
    if rec.plan.status == MissionStatus::Draft {
        return fail("stored missions are at least briefed".into());
    }
    let finished = matches!(rec.plan.status, MissionStatus::Succeeded | MissionStatus::Failed);
    if rec.trajectory_path.is_some() && !finished {
        return fail(format!("trajectory on a {} mission", rec.plan.status));
    }
    for stamp in [&rec.created, &rec.updated] {
        if OffsetDateTime::parse(stamp, &Rfc3339).is_err() {
            return fail(format!("bad timestamp `{stamp}`"));
        }
    }
    if rec.config.n_sheep != rec.plan.flock.len() {
        return fail("config flock size differs from plan".into());
    }
    Ok(())
}
