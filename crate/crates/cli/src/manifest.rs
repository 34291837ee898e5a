//! Per-run record of parameters, outputs and their hashes.

use std::path::Path;
use std::time::Duration;

use anyhow::Context;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::config::Settings;

#[derive(Serialize)]
struct FileRecord {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
pub struct Manifest {
    command: String,
    #[serde(skip)]
    tag: String,
    parameters: Value,
    tolerances: Settings,
    inputs: Vec<FileRecord>,
    artifacts: Vec<FileRecord>,
    outcome: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    exit_code: u8,
    wall_time_s: f64,
}

fn sha256(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Manifest {
    pub fn new(settings: &Settings) -> Self {
        Self {
            command: String::new(),
            tag: String::new(),
            parameters: Value::Null,
            tolerances: settings.clone(),
            inputs: Vec::new(),
            artifacts: Vec::new(),
            outcome: String::from("error"),
            error: None,
            exit_code: 0,
            wall_time_s: 0.0,
        }
    }

    /// `tag` distinguishes manifests of the same command in one directory.
    pub fn command(&mut self, name: &str, tag: &str, parameters: Value) {
        self.command = name.to_string();
        self.tag = tag.to_string();
        self.parameters = parameters;
    }

    pub fn outcome(&mut self, outcome: &str) {
        self.outcome = outcome.to_string();
    }

    pub fn error(&mut self, message: &str) {
        self.error = Some(message.to_string());
    }

    pub fn input(&mut self, path: &Path) -> anyhow::Result<()> {
        let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        self.inputs.push(FileRecord {
            path: path.display().to_string(),
            sha256: sha256(&bytes),
        });
        Ok(())
    }

    pub fn write(&mut self, dir: &Path, name: &str, contents: &str) -> anyhow::Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        self.artifacts.push(FileRecord {
            path: name.to_string(),
            sha256: sha256(contents.as_bytes()),
        });
        Ok(())
    }

    /// Writes `manifest_<command>_<tag>.json`.
    pub fn finish(mut self, dir: &Path, elapsed: Duration, exit_code: u8) -> anyhow::Result<()> {
        self.exit_code = exit_code;
        self.wall_time_s = elapsed.as_secs_f64();
        let name = if self.tag.is_empty() {
            format!("manifest_{}.json", self.command)
        } else {
            format!("manifest_{}_{}.json", self.command, self.tag)
        };
        let path = dir.join(name);
        let text = serde_json::to_string_pretty(&self)? + "\n";
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
    }
}
