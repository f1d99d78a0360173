//! Content-addressed result cache.
//!
//! An entry lives at `<root>/<first two hex digits>/<sha256>.json`. It is written
//! to a temporary file in the same directory and renamed into place.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use rand::rngs::StdRng;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::CliError;
use crate::format::render;
use crate::task::Task;

pub const FORMAT: u32 = 1;
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Entry {
    pub format: u32,
    pub version: String,
    pub key: String,
    pub created_at: u64,
    pub task: Task,
    pub payload: Value,
}

pub struct Cache {
    root: PathBuf,
}

pub fn key(task: &Task) -> String {
    let text = serde_json::to_string(task).expect("tasks serialize");
    let mut h = Sha256::new();
    h.update(format!("bconv-cache/{FORMAT}/{VERSION}\n").as_bytes());
    h.update(text.as_bytes());
    hex::encode(h.finalize())
}

impl Cache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Cache { root: root.into() }
    }

    fn path(&self, key: &str) -> PathBuf {
        self.root.join(&key[..2]).join(format!("{key}.json"))
    }

    /// A cached payload, or `None` on a miss, a version mismatch or a damaged entry.
    pub fn get(&self, task: &Task) -> Option<Value> {
        let key = key(task);
        let text = fs::read_to_string(self.path(&key)).ok()?;
        let e: Entry = serde_json::from_str(&text).ok()?;
        (e.format == FORMAT && e.version == VERSION && e.key == key && &e.task == task).then_some(e.payload)
    }

    pub fn put(&self, task: &Task, payload: &Value) -> Result<(), CliError> {
        let key = key(task);
        let path = self.path(&key);
        let dir = path.parent().expect("entry paths have a parent");
        fs::create_dir_all(dir)?;
        let created_at = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        let e = Entry {
            format: FORMAT,
            version: VERSION.to_string(),
            key,
            created_at,
            task: task.clone(),
            payload: payload.clone(),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        tmp.write_all(serde_json::to_string(&e).expect("entries serialize").as_bytes())?;
        tmp.as_file().sync_all()?;
        tmp.persist(&path).map_err(|e| CliError::Io(e.to_string()))?;
        Ok(())
    }

    /// Every entry file, sorted by key, with its parse result.
    fn scan(&self) -> Result<Vec<(String, u64, Result<Entry, String>)>, CliError> {
        let mut out = Vec::new();
        if !self.root.exists() {
            return Ok(out);
        }
        for shard in fs::read_dir(&self.root)? {
            let shard = shard?.path();
            if !shard.is_dir() {
                continue;
            }
            for f in fs::read_dir(&shard)? {
                let p = f?.path();
                if p.extension().and_then(|x| x.to_str()) != Some("json") {
                    continue;
                }
                let name = p.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
                let bytes = fs::metadata(&p).map_or(0, |m| m.len());
                let parsed = fs::read_to_string(&p)
                    .map_err(|e| e.to_string())
                    .and_then(|t| serde_json::from_str::<Entry>(&t).map_err(|e| e.to_string()))
                    .and_then(|e| {
                        if e.key != name {
                            Err("key does not match file name".to_string())
                        } else if e.version == VERSION && e.format == FORMAT && e.key != key(&e.task) {
                            Err("key does not match task".to_string())
                        } else {
                            Ok(e)
                        }
                    });
                out.push((name, bytes, parsed));
            }
        }
        out.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(out)
    }

    pub fn stat(&self) -> Result<Value, CliError> {
        let entries = self.scan()?;
        let mut items = Vec::new();
        let mut corrupted = Vec::new();
        let mut stale = 0usize;
        for (name, bytes, e) in &entries {
            match e {
                Ok(e) => {
                    if e.version != VERSION || e.format != FORMAT {
                        stale += 1;
                    }
                    items.push(json!({
                        "key": name,
                        "op": e.task.op(),
                        "lambda": e.task.lambda().map(|d| d.label()),
                        "version": e.version,
                        "created_at": e.created_at,
                        "bytes": bytes,
                    }));
                }
                Err(reason) => corrupted.push(json!({ "key": name, "reason": reason })),
            }
        }
        Ok(json!({
            "root": self.root.display().to_string(),
            "entries": entries.len(),
            "bytes": entries.iter().map(|e| e.1).sum::<u64>(),
            "stale": stale,
            "corrupted": corrupted,
            "items": items,
        }))
    }

    pub fn clear(&self) -> Result<Value, CliError> {
        let entries = self.scan()?;
        let mut removed = 0;
        for (name, _, _) in &entries {
            match fs::remove_file(self.path(name)) {
                Ok(()) => removed += 1,
                Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
                Err(e) => return Err(e.into()),
            }
        }
        if self.root.exists() {
            for shard in fs::read_dir(&self.root)? {
                let p = shard?.path();
                if p.is_dir() {
                    // only empty shards go; anything foreign stays
                    let _ = fs::remove_dir(&p);
                }
            }
        }
        Ok(json!({ "root": self.root.display().to_string(), "removed": removed }))
    }

    /// Recomputes a random sample of current-version entries and compares the
    /// rendered payloads byte for byte.
    pub fn verify(&self, fraction: f64, seed: Option<u64>) -> Result<(Value, bool), CliError> {
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(CliError::Usage("--fraction must lie in (0, 1]".into()));
        }
        let entries = self.scan()?;
        let mut corrupted = Vec::new();
        let mut live = Vec::new();
        for (name, _, e) in entries {
            match e {
                Ok(e) if e.version == VERSION && e.format == FORMAT => live.push(e),
                Ok(_) => {}
                Err(reason) => corrupted.push(json!({ "key": name, "reason": reason })),
            }
        }
        let k = ((live.len() as f64 * fraction).ceil() as usize).min(live.len());
        let mut rng = match seed {
            Some(s) => StdRng::seed_from_u64(s),
            None => StdRng::from_os_rng(),
        };
        let mut picked: Vec<usize> = rand::seq::index::sample(&mut rng, live.len(), k).into_vec();
        picked.sort_unstable();
        let mut mismatched = Vec::new();
        let mut failed = Vec::new();
        for &i in &picked {
            let e = &live[i];
            match e.task.run() {
                Ok(v) if render(&v) == render(&e.payload) => {}
                Ok(_) => mismatched.push(Value::String(e.key.clone())),
                Err(err) => failed.push(json!({ "key": e.key, "reason": err.to_string() })),
            }
        }
        let matched = picked.len() - mismatched.len() - failed.len();
        let rate = if picked.is_empty() { 1.0 } else { matched as f64 / picked.len() as f64 };
        let ok = mismatched.is_empty() && failed.is_empty();
        Ok((
            json!({
                "root": self.root.display().to_string(),
                "entries": live.len(),
                "sampled": picked.len(),
                "matched": matched,
                "match_rate": rate,
                "mismatched": mismatched,
                "failed": failed,
                "corrupted": corrupted,
            }),
            ok,
        ))
    }
}

/// Runs a task through the cache when one is configured.
pub fn execute(task: &Task, cache: Option<&Cache>) -> Result<Value, CliError> {
    if let Some(c) = cache {
        if let Some(v) = c.get(task) {
            return Ok(v);
        }
    }
    let v = task.run()?;
    if let Some(c) = cache {
        c.put(task, &v)?;
    }
    Ok(v)
}
