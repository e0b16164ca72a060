//! Subcommand implementations and shared plumbing.

pub mod export_graph;
pub mod fidelity;
pub mod generate;
pub mod render;
pub mod sweep;
pub mod utility;

use std::path::Path;
use synthcap::report::ReportBundle;

/// Process exit codes: 0 success, 1 usage/config error, 2 partial success
/// (metrics skipped), 3 runtime failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmdStatus {
    Success,
    Partial,
}

impl CmdStatus {
    pub fn code(self) -> i32 {
        match self {
            CmdStatus::Success => 0,
            CmdStatus::Partial => 2,
        }
    }
}

/// Error carrying its intended exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

pub fn usage(message: impl Into<String>) -> CliError {
    CliError { code: 1, message: message.into() }
}

pub fn runtime(message: impl std::fmt::Display) -> CliError {
    CliError { code: 3, message: message.to_string() }
}

/// Writes `report.json` and `report.md` for a bundle under `dir`.
pub fn write_bundle(bundle: &ReportBundle, dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| runtime(format!("creating {}: {e}", dir.display())))?;
    let json_path = dir.join("report.json");
    std::fs::write(&json_path, bundle.to_json_pretty())
        .map_err(|e| runtime(format!("writing {}: {e}", json_path.display())))?;
    let md_path = dir.join("report.md");
    std::fs::write(&md_path, bundle.to_markdown())
        .map_err(|e| runtime(format!("writing {}: {e}", md_path.display())))?;
    Ok(())
}
