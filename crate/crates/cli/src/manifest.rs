use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::commands::Params;
use crate::error::{CliError, CliResult};

/// Record of one run. `params` holds every resolved input, so replaying it
/// rewrites the same output bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Command line as typed, after the program name.
    pub args: Vec<String>,
    pub params: Params,
    pub seed: Option<u64>,
    pub version: String,
    pub outputs: Vec<PathBuf>,
    pub duration_secs: f64,
}

impl RunManifest {
    pub fn write(&self, path: &Path) -> CliResult<()> {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        std::fs::write(path, text).map_err(|e| CliError::io(path, e))
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::invalid(format!("{}: malformed manifest: {e}", path.display())))
    }
}

/// `<out>.manifest.json` next to a single output file.
pub fn manifest_path_for(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    out.with_file_name(name)
}
