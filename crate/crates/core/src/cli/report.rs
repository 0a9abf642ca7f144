use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use super::InputError;
use crate::numeric::ToleranceConfig;
use crate::statefile::{LoadedState, StateFile};

#[derive(Debug, Clone, Serialize)]
pub struct FileInput {
    pub role: String,
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Inputs {
    pub files: Vec<FileInput>,
    pub flags: BTreeMap<String, Value>,
}

impl Inputs {
    pub fn flag(&mut self, name: &str, value: impl Into<Value>) {
        self.flags.insert(name.to_string(), value.into());
    }

    /// Reads a state file, recording its hash.
    pub fn state(&mut self, role: &str, path: &Path) -> Result<LoadedState, InputError> {
        let bytes = std::fs::read(path).map_err(|e| InputError(format!("cannot read {}: {e}", path.display())))?;
        self.files.push(FileInput {
            role: role.to_string(),
            path: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(&bytes)),
        });
        let text = String::from_utf8(bytes).map_err(|_| InputError(format!("{} is not UTF-8", path.display())))?;
        StateFile::from_json(&text)
            .and_then(|f| f.to_state())
            .map_err(|e| InputError(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportDocument {
    pub command: String,
    pub inputs: Inputs,
    pub verdict: String,
    pub data: Value,
    pub seed: u64,
    pub tolerances: ToleranceConfig,
    /// Text form; not part of the JSON schema.
    #[serde(skip)]
    pub lines: Vec<String>,
}

impl ReportDocument {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}: {}", self.command, self.verdict);
        for line in &self.lines {
            out.push('\n');
            out.push_str(line);
        }
        out
    }
}
