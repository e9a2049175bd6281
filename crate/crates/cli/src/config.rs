//! Run configuration: defaults, an optional `key=value` file, then flags.

use std::path::{Path, PathBuf};

use cherw_core::exact::{parse_scalar, Scalar};
use cherw_core::liedata::LieKind;
use cherw_core::pairings::DEFAULT_JMAX_CAP;
use cherw_core::pbw::DEFAULT_SYM_CAP;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub kind: LieKind,
    pub n: usize,
    pub m: usize,
    pub zeta: Option<Vec<Scalar>>,
    pub lambda: Option<Vec<Scalar>>,
    pub max_n: usize,
    pub max_m: usize,
    pub case: Option<String>,
    pub format: Format,
    pub jmax_cap: usize,
    pub sym_cap: usize,
    pub cache_dir: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub timings: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            kind: LieKind::Gl,
            n: 1,
            m: 1,
            zeta: None,
            lambda: None,
            max_n: 2,
            max_m: 2,
            case: None,
            format: Format::Json,
            jmax_cap: DEFAULT_JMAX_CAP,
            sym_cap: DEFAULT_SYM_CAP as usize,
            cache_dir: None,
            output: None,
            timings: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

fn bad(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

pub fn parse_kind(s: &str) -> Result<LieKind, ConfigError> {
    match s.trim() {
        "gl" => Ok(LieKind::Gl),
        "sp" => Ok(LieKind::Sp),
        other => Err(bad(format!("unknown kind '{}' (expected gl or sp)", other))),
    }
}

pub fn parse_list(s: &str) -> Result<Vec<Scalar>, ConfigError> {
    s.split(',').map(|t| parse_scalar(t).ok_or_else(|| bad(format!("not a rational number: '{}'", t.trim())))).collect()
}

fn parse_usize(key: &str, s: &str) -> Result<usize, ConfigError> {
    s.trim().parse().map_err(|_| bad(format!("{}: expected a non-negative integer, got '{}'", key, s.trim())))
}

fn parse_bool(key: &str, s: &str) -> Result<bool, ConfigError> {
    match s.trim() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => Err(bad(format!("{}: expected true or false, got '{}'", key, other))),
    }
}

pub fn parse_format(s: &str) -> Result<Format, ConfigError> {
    match s.trim() {
        "json" => Ok(Format::Json),
        "text" => Ok(Format::Text),
        other => Err(bad(format!("unknown format '{}' (expected json or text)", other))),
    }
}

impl RunConfig {
    /// Applies one `key=value` setting; keys accept `-` or `_`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key.trim().replace('-', "_").as_str() {
            "kind" => self.kind = parse_kind(value)?,
            "n" => self.n = parse_usize("n", value)?,
            "m" => self.m = parse_usize("m", value)?,
            "zeta" => self.zeta = Some(parse_list(value)?),
            "lambda" => self.lambda = Some(parse_list(value)?),
            "max_n" => self.max_n = parse_usize("max_n", value)?,
            "max_m" => self.max_m = parse_usize("max_m", value)?,
            "case" => self.case = Some(value.trim().to_string()),
            "format" => self.format = parse_format(value)?,
            "jmax" => self.jmax_cap = parse_usize("jmax", value)?,
            "sym_cap" => self.sym_cap = parse_usize("sym_cap", value)?,
            "cache_dir" => self.cache_dir = Some(PathBuf::from(value.trim())),
            "output" => self.output = Some(PathBuf::from(value.trim())),
            "timings" => self.timings = parse_bool("timings", value)?,
            other => return Err(bad(format!("unknown config key '{}'", other))),
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| bad(format!("cannot read config {}: {}", path.display(), e)))?;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("{}:{}: expected key=value", path.display(), i + 1)))?;
            self.set(k, v).map_err(|e| bad(format!("{}:{}: {}", path.display(), i + 1, e)))?;
        }
        Ok(())
    }

    /// Caps must be positive; sizes are checked against the caps.
    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, v) in [("jmax", self.jmax_cap), ("sym_cap", self.sym_cap), ("max_n", self.max_n), ("max_m", self.max_m)] {
            if v == 0 {
                return Err(bad(format!("{} must be positive", name)));
            }
        }
        if self.n == 0 {
            return Err(bad("n must be positive"));
        }
        // r_j is symmetrized from a degree-j polynomial (degree 2j for sp)
        let top = if self.kind == LieKind::Sp { 2 * self.m } else { self.m };
        if self.m > self.jmax_cap || top > self.sym_cap {
            return Err(bad(format!("m = {} exceeds the caps (jmax {}, sym_cap {})", self.m, self.jmax_cap, self.sym_cap)));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use cherw_core::exact::{frac, int};

    #[test]
    fn keys_and_rejections() {
        let mut c = RunConfig::default();
        c.set("max-n", "3").unwrap();
        c.set("zeta", "0, -1/2").unwrap();
        assert_eq!(c.max_n, 3);
        assert_eq!(c.zeta, Some(vec![int(0), frac(-1, 2)]));
        assert!(c.set("colour", "blue").is_err());
        assert!(c.set("kind", "sl").is_err());
        c.jmax_cap = 0;
        assert!(c.validate().is_err());
    }
}
