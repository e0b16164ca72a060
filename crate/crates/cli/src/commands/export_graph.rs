//! The `export-graph` command: builds a co-occurrence graph from a JSONL
//! dataset and serializes it.

use std::path::Path;
use synthcap::dataset::load_jsonl;
use synthcap::network::{build_graph, export_graph, ExportFormat, GraphKind};

use super::{runtime, usage, CliError, CmdStatus};

pub fn run(
    data: &Path,
    kind: GraphKind,
    format: ExportFormat,
    out: &Path,
) -> Result<CmdStatus, CliError> {
    let dataset =
        load_jsonl(data).map_err(|e| usage(format!("loading {}: {e}", data.display())))?;
    let graph = build_graph(&dataset, kind);
    if let Some(parent) = out.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| runtime(format!("creating {}: {e}", parent.display())))?;
        }
    }
    export_graph(&graph, format, out).map_err(|e| runtime(e.to_string()))?;
    println!(
        "exported {} graph ({} nodes, {} edges) to {}",
        kind.as_str(),
        graph.n_nodes(),
        graph.n_edges(),
        out.display()
    );
    Ok(CmdStatus::Success)
}
