//! Plot-ready output files: CSV with unit-annotated headers and JSON records.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::cache::{content_hash, write_atomic, VERSION};
use crate::config::{Format, RunConfig};
use crate::error::CliError;

/// Envelope written around every JSON payload.
#[derive(Debug, Serialize)]
pub struct ResultRecord<'a, P> {
    pub config_hash: &'a str,
    pub kind: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub engine: Option<&'a str>,
    pub version: &'a str,
    /// Seconds since the epoch from `SOURCE_DATE_EPOCH`; omitted when unset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
    pub config: &'a RunConfig,
    pub payload: P,
}

pub fn source_date_epoch() -> Option<u64> {
    std::env::var("SOURCE_DATE_EPOCH").ok()?.trim().parse().ok()
}

/// Shortest representation that parses back to the same `f64`.
pub fn num(v: f64) -> String {
    format!("{v}")
}

pub fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub struct Output<'a> {
    dir: PathBuf,
    config: &'a RunConfig,
    config_hash: String,
}

impl<'a> Output<'a> {
    pub fn new(config: &'a RunConfig, dir_override: Option<&Path>) -> Result<Self, CliError> {
        let dir = dir_override.map_or_else(|| PathBuf::from(&config.output.directory), Path::to_path_buf);
        fs::create_dir_all(&dir)?;
        Ok(Self {
            dir,
            config,
            config_hash: content_hash("config", config)?,
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Writes a CSV table, followed by `# key,value` footer lines.
    pub fn csv(
        &self,
        name: &str,
        header: &[String],
        rows: &[Vec<String>],
        footer: &[(&str, String)],
    ) -> Result<(), CliError> {
        if !self.config.output.wants(Format::Csv) {
            return Ok(());
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        let mut bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
        for (k, v) in footer {
            bytes.extend_from_slice(format!("# {k},{v}\n").as_bytes());
        }
        write_atomic(&self.dir.join(name), &bytes)
    }

    pub fn record<P: Serialize>(
        &self,
        name: &str,
        kind: &str,
        engine: Option<&str>,
        payload: P,
    ) -> Result<(), CliError> {
        if !self.config.output.wants(Format::Json) {
            return Ok(());
        }
        let rec = ResultRecord {
            config_hash: &self.config_hash,
            kind,
            engine,
            version: VERSION,
            timestamp: source_date_epoch(),
            config: self.config,
            payload,
        };
        let mut bytes = serde_json::to_vec_pretty(&rec)?;
        bytes.push(b'\n');
        write_atomic(&self.dir.join(name), &bytes)
    }
}
