use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Record of one command-line run. Written with `status = "running"` before
/// any work starts and rewritten when the run ends.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub config_path: Option<PathBuf>,
    /// Fully resolved configuration (study config, settings or model parameters).
    pub config: serde_json::Value,
    pub master_seed: u64,
    pub seed_generated: bool,
    pub threads: Option<usize>,
    pub tool_version: String,
    pub started_at: String,
    pub finished_at: Option<String>,
    pub status: String,
    pub error: Option<String>,
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    pub fn new(command: &str, argv: &[String], config_path: Option<PathBuf>, config: serde_json::Value, seed: u64) -> Self {
        Self {
            command: command.into(),
            argv: argv.to_vec(),
            config_path,
            config,
            master_seed: seed,
            seed_generated: false,
            threads: None,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            started_at: now(),
            finished_at: None,
            status: "running".into(),
            error: None,
            outputs: Vec::new(),
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }

    pub fn finish(&mut self, outcome: &Result<()>) {
        self.finished_at = Some(now());
        match outcome {
            Ok(()) => self.status = "ok".into(),
            Err(e) => {
                self.status = "error".into();
                self.error = Some(e.to_string());
            }
        }
    }
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}
