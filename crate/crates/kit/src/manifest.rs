//! Run manifests: everything needed to reproduce a set of outputs.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use centering_core::{InstantiationConfig, PermutationPlan, RecencyConfig};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cli::Command;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// The JSON accepted by `--config`: the instantiation fields at top level,
/// plus optional `recency` and `permutation` sections.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ConfigFile {
    #[serde(flatten)]
    pub centering: InstantiationConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recency: Option<RecencyConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub permutation: Option<PermutationPlan>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputFile {
    pub path: PathBuf,
    pub sha256: String,
}

impl InputFile {
    pub fn read(path: &Path) -> io::Result<Self> {
        Ok(InputFile { path: path.to_owned(), sha256: sha256_hex(&fs::read(path)?) })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub command: Command,
    pub config: ConfigFile,
    pub plan: PermutationPlan,
    pub inputs: Vec<InputFile>,
    /// Files written by the run, relative to the output directory.
    #[serde(default)]
    pub outputs: Vec<String>,
}

#[derive(Serialize)]
struct Hashed<'a> {
    tool_version: &'a str,
    command: &'a Command,
    config: &'a ConfigFile,
    plan: &'a PermutationPlan,
    inputs: &'a [InputFile],
}

impl RunManifest {
    /// Hash of everything that determines the outputs.
    pub fn hash(&self) -> String {
        let h = Hashed {
            tool_version: &self.tool_version,
            command: &self.command,
            config: &self.config,
            plan: &self.plan,
            inputs: &self.inputs,
        };
        sha256_hex(&serde_json::to_vec(&h).expect("manifest serializes"))
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}
