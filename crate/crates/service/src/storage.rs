use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use axum::http::StatusCode;
use carebot_core::Session;
use serde::{Deserialize, Serialize};

use crate::error::ApiError;

/// On-disk form of a session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub id: String,
    pub created_at: u64,
    pub session: Session,
}

fn storage_unavailable(path: &Path, e: io::Error) -> ApiError {
    ApiError::new(
        StatusCode::INTERNAL_SERVER_ERROR,
        "STORAGE_UNAVAILABLE",
        format!("{}: {e}", path.display()),
    )
}

/// Only these ids ever map to a file name.
pub fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.len() <= 64 && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}

#[derive(Debug, Clone)]
pub struct SnapshotStore {
    dir: PathBuf,
}

impl SnapshotStore {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, ApiError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| storage_unavailable(&dir, e))?;
        Ok(SnapshotStore { dir })
    }

    fn path(&self, id: &str) -> PathBuf {
        self.dir.join(format!("{id}.json"))
    }

    /// Writes the snapshot through a temporary file so that a crash never
    /// leaves a half-written snapshot behind.
    pub fn save(&self, snapshot: &Snapshot) -> Result<(), ApiError> {
        let path = self.path(&snapshot.id);
        let tmp = self.dir.join(format!(".{}.json.tmp", snapshot.id));
        let bytes = serde_json::to_vec_pretty(snapshot).expect("snapshots serialize");
        fs::write(&tmp, bytes).map_err(|e| storage_unavailable(&tmp, e))?;
        fs::rename(&tmp, &path).map_err(|e| storage_unavailable(&path, e))
    }

    pub fn load(&self, id: &str) -> Result<Option<Snapshot>, ApiError> {
        if !valid_id(id) {
            return Ok(None);
        }
        let path = self.path(id);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(storage_unavailable(&path, e)),
        };
        serde_json::from_slice(&bytes).map(Some).map_err(|e| {
            ApiError::new(
                StatusCode::INTERNAL_SERVER_ERROR,
                "CORRUPT_SNAPSHOT",
                format!("{}: {e}", path.display()),
            )
        })
    }

    /// Largest numeric suffix among stored `s<N>` ids.
    pub fn max_counter(&self) -> u64 {
        let Ok(entries) = fs::read_dir(&self.dir) else {
            return 0;
        };
        entries
            .filter_map(|e| e.ok())
            .filter_map(|e| {
                let name = e.file_name().into_string().ok()?;
                name.strip_suffix(".json")?.strip_prefix('s')?.parse::<u64>().ok()
            })
            .max()
            .unwrap_or(0)
    }
}
