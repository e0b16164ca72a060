//! The `report` command: re-renders the markdown tables from a JSON report
//! bundle (the JSON is the contract, markdown is derived).

use std::path::Path;
use synthcap::report::ReportBundle;

use super::{runtime, usage, CliError, CmdStatus};

pub fn run(input: &Path, output: &Path) -> Result<CmdStatus, CliError> {
    let body = std::fs::read_to_string(input)
        .map_err(|e| usage(format!("cannot read {}: {e}", input.display())))?;
    let bundle: ReportBundle = serde_json::from_str(&body)
        .map_err(|e| usage(format!("{} is not a report bundle: {e}", input.display())))?;
    std::fs::write(output, bundle.to_markdown())
        .map_err(|e| runtime(format!("writing {}: {e}", output.display())))?;
    println!("rendered {} to {}", input.display(), output.display());
    Ok(CmdStatus::Success)
}
