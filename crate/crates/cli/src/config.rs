//! Run configuration: merged from a JSON file and command-line flags.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("invalid config JSON: {0}")]
    Json(String),
    #[error("missing required setting `{0}`")]
    Missing(&'static str),
    #[error("invalid value for `{field}`: {msg}")]
    Invalid { field: &'static str, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Cohomology,
    SectionRing,
    Pipeline,
    Dream,
    Harbater,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Table,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum HarbaterOp {
    Radius,
    Membership,
    Evaluate,
    Divide,
    Expand,
}

/// Every setting any command reads. Unset fields fall back to per-command defaults.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curve: Option<String>,
    /// Degree range `a..b` (inclusive) or a single integer.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window_bottom: Option<i64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub uncertified_ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_degree: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    #[serde(rename = "M", skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub trivial_action: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub element: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub op: Option<HarbaterOp>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

/// Largest accepted |n| and range length.
pub const MAX_DEGREE_ABS: i64 = 512;
pub const MAX_RANGE_LEN: i64 = 128;
pub const MAX_ORDER: usize = 256;

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::Json(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// Fields set in `over` win.
    pub fn overlay(self, over: RunConfig) -> RunConfig {
        RunConfig {
            command: over.command.or(self.command),
            curve: over.curve.or(self.curve),
            n: over.n.or(self.n),
            cutoff: over.cutoff.or(self.cutoff),
            window_bottom: over.window_bottom.or(self.window_bottom),
            uncertified_ok: over.uncertified_ok || self.uncertified_ok,
            max_degree: over.max_degree.or(self.max_degree),
            f: over.f.or(self.f),
            m: over.m.or(self.m),
            trivial_action: over.trivial_action || self.trivial_action,
            x: over.x.or(self.x),
            r: over.r.or(self.r),
            element: over.element.or(self.element),
            op: over.op.or(self.op),
            format: over.format.or(self.format),
            output: over.output.or(self.output),
        }
    }

    pub fn command(&self) -> Result<Command, ConfigError> {
        self.command.ok_or(ConfigError::Missing("command"))
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or_default()
    }

    pub fn degrees(&self, default: Option<&str>) -> Result<Vec<i64>, ConfigError> {
        let text = self.n.as_deref().or(default).ok_or(ConfigError::Missing("n"))?;
        parse_range(text)
    }

    pub fn order(&self, default: usize) -> Result<usize, ConfigError> {
        let m = self.m.unwrap_or(default);
        if !(2..=MAX_ORDER).contains(&m) {
            return Err(ConfigError::Invalid { field: "M", msg: format!("need 2 <= M <= {MAX_ORDER}, got {m}") });
        }
        Ok(m)
    }

    /// Checks everything that does not need the math library.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let cmd = self.command()?;
        if let Some(n) = &self.n {
            parse_range(n)?;
        }
        if self.m.is_some() {
            self.order(16)?;
        }
        if let Some(d) = self.max_degree {
            if d > 64 {
                return Err(ConfigError::Invalid { field: "max_degree", msg: format!("{d} exceeds 64") });
            }
        }
        match cmd {
            Command::Cohomology | Command::SectionRing => {
                self.curve.as_ref().ok_or(ConfigError::Missing("curve"))?;
            }
            Command::Pipeline => {
                if self.f.is_none() && !self.trivial_action {
                    return Err(ConfigError::Missing("f"));
                }
            }
            Command::Dream => {
                self.x.as_ref().ok_or(ConfigError::Missing("x"))?;
                self.r.as_ref().ok_or(ConfigError::Missing("r"))?;
            }
            Command::Harbater => {
                self.op.ok_or(ConfigError::Missing("op"))?;
                self.element.as_ref().ok_or(ConfigError::Missing("element"))?;
            }
        }
        Ok(())
    }
}

/// `a..b` (inclusive), `a..=b`, or a single integer.
pub fn parse_range(text: &str) -> Result<Vec<i64>, ConfigError> {
    let bad = |msg: String| ConfigError::Invalid { field: "n", msg };
    let int = |s: &str| s.trim().parse::<i64>().map_err(|_| bad(format!("not an integer: {s:?}")));
    let (a, b) = match text.split_once("..") {
        Some((a, b)) => (int(a)?, int(b.strip_prefix('=').unwrap_or(b))?),
        None => {
            let v = int(text)?;
            (v, v)
        }
    };
    if a > b {
        return Err(bad(format!("empty range {a}..{b}")));
    }
    if a.abs() > MAX_DEGREE_ABS || b.abs() > MAX_DEGREE_ABS {
        return Err(bad(format!("degrees must lie in [-{MAX_DEGREE_ABS}, {MAX_DEGREE_ABS}]")));
    }
    if b - a >= MAX_RANGE_LEN {
        return Err(bad(format!("range longer than {MAX_RANGE_LEN}")));
    }
    Ok((a..=b).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("-3..3").unwrap(), (-3..=3).collect::<Vec<_>>());
        assert_eq!(parse_range("2").unwrap(), [2]);
        assert_eq!(parse_range("-1..=1").unwrap(), [-1, 0, 1]);
        assert!(parse_range("3..1").is_err());
        assert!(parse_range("a..1").is_err());
        assert!(parse_range("0..10000").is_err());
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"command":"cohomology","curve":"p1","n":"-3..3","M":16}"#;
        let cfg = RunConfig::from_json(text).unwrap();
        assert_eq!(cfg.to_json(), text);
        assert!(cfg.validate().is_ok());
        assert!(RunConfig::from_json(r#"{"command":"cohomology","bogus":1}"#).is_err());
    }

    #[test]
    fn overlay_prefers_flags() {
        let base = RunConfig { curve: Some("p1".into()), n: Some("0".into()), ..Default::default() };
        let flags = RunConfig { command: Some(Command::Cohomology), n: Some("1".into()), ..Default::default() };
        let cfg = base.overlay(flags);
        assert_eq!((cfg.curve.as_deref(), cfg.n.as_deref()), (Some("p1"), Some("1")));
    }

    #[test]
    fn missing_fields() {
        let cfg = RunConfig { command: Some(Command::Dream), x: Some("1/3".into()), ..Default::default() };
        assert_eq!(cfg.validate(), Err(ConfigError::Missing("r")));
        assert_eq!(RunConfig::default().validate(), Err(ConfigError::Missing("command")));
    }
}
