//! On-disk cache of pairing tables and presentations, keyed by a content
//! hash of the parameters. Each file records the format version; a mismatch
//! invalidates it, and an unreadable file is recomputed with a warning.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use cherw_core::report::sort_keys;

pub const CACHE_VERSION: u32 = 1;

pub struct Cache {
    dir: PathBuf,
    log: Box<dyn Fn(&str) + Send + Sync>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lookup {
    Hit,
    Miss,
    Stale,
    Corrupt,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into(), log: Box::new(|m| eprintln!("cherw: {}", m)) }
    }

    pub fn with_log(mut self, log: impl Fn(&str) + Send + Sync + 'static) -> Self {
        self.log = Box::new(log);
        self
    }

    /// `--cache-dir`, then `CHERW_CACHE_DIR`, then the config value, then `.cherw-cache`.
    pub fn resolve_dir(flag: Option<&Path>, config: Option<&Path>) -> PathBuf {
        if let Some(f) = flag {
            return f.to_path_buf();
        }
        if let Ok(env) = std::env::var("CHERW_CACHE_DIR") {
            if !env.is_empty() {
                return PathBuf::from(env);
            }
        }
        config.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from(".cherw-cache"))
    }

    pub fn key(kind: &str, params: &Value) -> String {
        let canon = sort_keys(json!({ "kind": kind, "params": params }));
        let digest = Sha256::digest(canon.to_string().as_bytes());
        digest.iter().map(|b| format!("{:02x}", b)).collect()
    }

    pub fn path(&self, kind: &str, params: &Value) -> PathBuf {
        self.dir.join(format!("{}-{}.json", kind, &Self::key(kind, params)[..16]))
    }

    fn read(&self, path: &Path, kind: &str, params: &Value) -> (Lookup, Option<Value>) {
        let Ok(text) = std::fs::read_to_string(path) else { return (Lookup::Miss, None) };
        let Ok(v) = serde_json::from_str::<Value>(&text) else { return (Lookup::Corrupt, None) };
        if v.get("cache_version").and_then(Value::as_u64) != Some(CACHE_VERSION as u64) {
            return (Lookup::Stale, None);
        }
        if v.get("kind").and_then(Value::as_str) != Some(kind) || v.get("params") != Some(&sort_keys(params.clone())) {
            return (Lookup::Corrupt, None);
        }
        match v.get("payload") {
            Some(p) => (Lookup::Hit, Some(p.clone())),
            None => (Lookup::Corrupt, None),
        }
    }

    /// Loads `kind/params` or computes and stores it.
    pub fn get_or_compute<T, E>(
        &self,
        kind: &str,
        params: Value,
        compute: impl FnOnce() -> Result<T, E>,
        to_json: impl Fn(&T) -> Value,
        from_json: impl Fn(&Value) -> Option<T>,
    ) -> Result<(T, Lookup), E> {
        let path = self.path(kind, &params);
        let t = Instant::now();
        let (mut status, payload) = self.read(&path, kind, &params);
        if let Some(p) = payload {
            if let Some(obj) = from_json(&p) {
                (self.log)(&format!("cache hit {} ({} ms)", path.display(), t.elapsed().as_millis()));
                return Ok((obj, Lookup::Hit));
            }
            status = Lookup::Corrupt;
        }
        match status {
            Lookup::Corrupt => (self.log)(&format!("warning: corrupt cache file {}, recomputing", path.display())),
            Lookup::Stale => (self.log)(&format!("cache file {} has another version, invalidated", path.display())),
            _ => {}
        }
        let obj = compute()?;
        (self.log)(&format!("cache miss {}: computed in {} ms", path.display(), t.elapsed().as_millis()));
        let file = json!({
            "cache_version": CACHE_VERSION,
            "kind": kind,
            "params": sort_keys(params),
            "payload": to_json(&obj),
        });
        let write = std::fs::create_dir_all(&self.dir)
            .and_then(|_| std::fs::write(&path, serde_json::to_string(&sort_keys(file)).unwrap_or_default()));
        if let Err(e) = write {
            (self.log)(&format!("warning: cannot write cache file {}: {}", path.display(), e));
        }
        Ok((obj, status))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::{Arc, Mutex};

    fn temp_dir(tag: &str) -> PathBuf {
        let d = std::env::temp_dir().join(format!("cherw-cache-unit-{}-{}", tag, std::process::id()));
        let _ = std::fs::remove_dir_all(&d);
        d
    }

    #[test]
    fn hit_stale_corrupt() {
        let dir = temp_dir("a");
        let lines = Arc::new(Mutex::new(Vec::<String>::new()));
        let l2 = lines.clone();
        let cache = Cache::new(&dir).with_log(move |m| l2.lock().unwrap().push(m.to_string()));
        let params = json!({"n": 2});
        let run = || cache.get_or_compute("t", params.clone(), || Ok::<_, ()>(7u64), |x| json!(x), |v| v.as_u64());
        assert_eq!(run().unwrap(), (7, Lookup::Miss));
        assert_eq!(run().unwrap(), (7, Lookup::Hit));
        let path = cache.path("t", &params);
        std::fs::write(&path, "{not json").unwrap();
        assert_eq!(run().unwrap(), (7, Lookup::Corrupt));
        let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        v["cache_version"] = json!(CACHE_VERSION + 1);
        std::fs::write(&path, v.to_string()).unwrap();
        assert_eq!(run().unwrap(), (7, Lookup::Stale));
        assert!(lines.lock().unwrap().iter().any(|l| l.starts_with("warning: corrupt")));
        let _ = std::fs::remove_dir_all(&dir);
    }

    #[test]
    fn key_ignores_param_order() {
        assert_eq!(Cache::key("p", &json!({"a": 1, "b": 2})), Cache::key("p", &json!({"b": 2, "a": 1})));
        assert_ne!(Cache::key("p", &json!({"a": 1})), Cache::key("q", &json!({"a": 1})));
    }
}
