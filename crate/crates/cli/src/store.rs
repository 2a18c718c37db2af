//! Experiment configuration and the append-only record store.

use std::collections::BTreeMap;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

/// A command with all of its parameters as one flat document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub command: String,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub params: BTreeMap<String, Value>,
}

impl ExperimentConfig {
    /// Parses a TOML file with top-level `command`, `seed`, optional
    /// `workers` and `out`, and a flat `[params]` table.
    pub fn from_toml(text: &str) -> Result<Self> {
        let doc: toml::Table = toml::from_str(text).context("config is not valid TOML")?;
        let mut missing = Vec::new();
        if !doc.contains_key("command") {
            missing.push("command");
        }
        if !doc.contains_key("seed") {
            missing.push("seed");
        }
        if !missing.is_empty() {
            bail!("config is missing required field(s): {}", missing.join(", "));
        }
        if let Some(p) = doc.get("params") {
            let t = p.as_table().context("`params` must be a table")?;
            if let Some((k, _)) = t.iter().find(|(_, v)| v.is_table()) {
                bail!("params.{k}: nested tables are not allowed");
            }
        }
        let cfg: Self = doc.try_into().context("config fields have the wrong types")?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    /// Command-line arguments equivalent to this config, global flags first.
    pub fn to_args(&self) -> Result<Vec<String>> {
        let mut args = vec!["rgg-limits".to_string(), "--seed".into(), self.seed.to_string()];
        if let Some(w) = self.workers {
            args.extend(["--workers".into(), w.to_string()]);
        }
        if let Some(o) = &self.out {
            args.extend(["--out".into(), o.display().to_string()]);
        }
        args.push(self.command.clone());
        for (k, v) in &self.params {
            let flag = format!("--{}", k.replace('_', "-"));
            match v {
                Value::Null | Value::Bool(false) => {}
                Value::Array(items) if items.is_empty() => {}
                Value::Bool(true) => args.push(flag),
                Value::Array(items) => {
                    let parts: Result<Vec<String>> = items.iter().map(scalar).collect();
                    args.extend([flag, parts.with_context(|| format!("params.{k}"))?.join(",")]);
                }
                v => args.extend([flag, scalar(v).with_context(|| format!("params.{k}"))?]),
            }
        }
        Ok(args)
    }

    /// Stable id: SHA-256 of the canonical JSON form, first 16 hex digits.
    pub fn id(&self) -> String {
        let canon = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canon.as_bytes());
        format!("{digest:x}")[..16].to_string()
    }
}

fn scalar(v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        Value::Bool(b) => Ok(b.to_string()),
        _ => bail!("expected a scalar value, found {v}"),
    }
}

/// One stored result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub id: String,
    pub timestamp: String,
    pub version: String,
    pub config: ExperimentConfig,
    pub payload: Value,
}

impl ResultRecord {
    pub fn new(config: &ExperimentConfig, payload: Value) -> Self {
        Self {
            id: config.id(),
            timestamp: chrono::Utc::now().to_rfc3339(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
            payload,
        }
    }
}

pub const RECORDS_FILE: &str = "records.jsonl";

/// Appends a record as one JSON line to `<dir>/records.jsonl`.
pub fn append_record(dir: &Path, rec: &ResultRecord) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(RECORDS_FILE);
    let mut f = OpenOptions::new()
        .create(true)
        .append(true)
        .open(&path)
        .with_context(|| format!("opening {}", path.display()))?;
    let mut line = serde_json::to_string(rec)?;
    line.push('\n');
    f.write_all(line.as_bytes())?;
    Ok(())
}

/// Appends rows to a CSV file, writing the header only when the file is new.
pub fn append_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let fresh = !path.exists() || std::fs::metadata(path)?.len() == 0;
    let f = OpenOptions::new().create(true).append(true).open(path)?;
    let mut w = csv::Writer::from_writer(f);
    if fresh {
        w.write_record(header)?;
    }
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Parses every line of a records file; malformed lines are returned as
/// warnings rather than errors.
pub fn read_records(text: &str) -> (Vec<ResultRecord>, Vec<String>) {
    let mut recs = Vec::new();
    let mut warnings = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str(line) {
            Ok(r) => recs.push(r),
            Err(e) => warnings.push(format!("line {}: skipped malformed record ({e})", i + 1)),
        }
    }
    (recs, warnings)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ExperimentConfig {
        ExperimentConfig::from_toml(
            r#"
            command = "estimate"
            seed = 7
            workers = 2
            [params]
            mode = "box"
            functional = "sigma"
            d = 1
            lambda = [1.0, 2.0]
            periodic = true
            n = []
            "#,
        )
        .unwrap()
    }

    #[test]
    fn toml_to_args() {
        let args = sample().to_args().unwrap();
        assert_eq!(
            args,
            [
                "rgg-limits",
                "--seed",
                "7",
                "--workers",
                "2",
                "estimate",
                "--d",
                "1",
                "--functional",
                "sigma",
                "--lambda",
                "1.0,2.0",
                "--mode",
                "box",
                "--periodic"
            ]
        );
    }

    #[test]
    fn config_errors() {
        assert!(ExperimentConfig::from_toml("").unwrap_err().to_string().contains("command, seed"));
        assert!(ExperimentConfig::from_toml("command = 1\nseed = 2").is_err());
        assert!(ExperimentConfig::from_toml("command = \"x\"\nseed = 1\n[params.a]\nb = 1").is_err());
    }

    #[test]
    fn records_round_trip_and_id_is_stable() {
        let c = sample();
        assert_eq!(c.id(), sample().id());
        let mut other = sample();
        other.seed = 8;
        assert_ne!(c.id(), other.id());
        let r = ResultRecord::new(&c, serde_json::json!({"mean": 0.5}));
        let line = serde_json::to_string(&r).unwrap();
        let (back, warn) = read_records(&format!("{line}\nnot json\n"));
        assert_eq!(back, vec![r]);
        assert_eq!(warn.len(), 1);
        assert_eq!(ExperimentConfig::from_toml(&c.to_toml().unwrap()).unwrap(), c);
    }
}
