//! Versioned JSON envelope shared by every report the tool writes.

use crate::{Error, Result, SCHEMA_VERSION};
use serde::{Deserialize, Serialize};
use std::time::{SystemTime, UNIX_EPOCH};

/// Run metadata; left out entirely with `--no-meta` so reports compare byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub version: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub threads: usize,
    pub seed: u64,
    pub argv: Vec<String>,
}

impl Meta {
    pub fn now(threads: usize, seed: u64, argv: Vec<String>) -> Self {
        let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        Self { version: env!("CARGO_PKG_VERSION").to_string(), timestamp, threads, seed, argv }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report<T> {
    pub schema_version: u32,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<Meta>,
    pub result: T,
}

impl<T: Serialize> Report<T> {
    pub fn new(kind: &str, meta: Option<Meta>, result: T) -> Self {
        Self { schema_version: SCHEMA_VERSION, kind: kind.to_string(), meta, result }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }
}

impl<T: for<'de> Deserialize<'de>> Report<T> {
    /// Parses a report, rejecting other schema versions.
    pub fn from_json(text: &str) -> Result<Self> {
        let r: Self = serde_json::from_str(text).map_err(|e| Error::InvalidSpec(e.to_string()))?;
        if r.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidSpec(format!("schema_version {} (expected {SCHEMA_VERSION})", r.schema_version)));
        }
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_and_version_check() {
        let r = Report::new("demo", None, vec![1.5, 2.0]);
        let text = r.to_json().unwrap();
        assert!(!text.contains("meta"));
        assert_eq!(Report::<Vec<f64>>::from_json(&text).unwrap(), r);
        let bumped = text.replace("\"schema_version\": 1", "\"schema_version\": 9");
        assert!(Report::<Vec<f64>>::from_json(&bumped).is_err());
        let m = Report::new("demo", Some(Meta::now(2, 7, vec!["fhl".into()])), 0u8);
        assert!(m.to_json().unwrap().contains("\"threads\": 2"));
    }
}
