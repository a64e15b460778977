use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use cdw_core::schema::{GraphDocument, SolutionDocument};
use cdw_core::{ConstraintSet, WorkflowGraph};
use sha2::{Digest, Sha256};

/// Lowercase hex SHA-256 of `bytes`.
pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// A graph file as loaded from disk, with the digest of its exact bytes.
pub struct LoadedGraph {
    pub graph: WorkflowGraph,
    pub constraints: ConstraintSet,
    pub digest: String,
}

pub fn read_graph(path: &Path) -> Result<LoadedGraph> {
    let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let text = std::str::from_utf8(&bytes).with_context(|| format!("{} is not UTF-8", path.display()))?;
    let doc = GraphDocument::from_json(text).with_context(|| format!("cannot parse {}", path.display()))?;
    let (graph, constraints) = doc
        .to_workflow()
        .with_context(|| format!("{} is not a valid workflow", path.display()))?;
    Ok(LoadedGraph { graph, constraints, digest: digest(&bytes) })
}

pub fn read_solution(path: &Path) -> Result<SolutionDocument> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    SolutionDocument::from_json(&text).with_context(|| format!("cannot parse {}", path.display()))
}

/// Writes `text` plus a trailing newline to `path`, or to stdout.
pub fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, format!("{text}\n")).with_context(|| format!("cannot write {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{text}")?;
            Ok(())
        }
    }
}
