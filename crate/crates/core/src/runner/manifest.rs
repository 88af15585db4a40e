//! Run manifests: a flat record of the resolved configuration, a fingerprint
//! of the dataset, and a checksum per output file. Re-running with the same
//! config and seed reproduces byte-identical CSV bodies, and a manifest left
//! in the output directory guards against silently resuming onto a different
//! dataset.

use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::{Graph, IdMap};

pub const MANIFEST_FILE: &str = "manifest.txt";

/// Identity of a canonical edge set: counts plus a content hash that is
/// independent of line order and comments in the source file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetFingerprint {
    pub nodes: usize,
    pub edges: usize,
    pub sha256: String,
}

/// Hashes the canonical raw-id edge set.
pub fn fingerprint(g: &Graph, ids: &IdMap) -> DatasetFingerprint {
    let mut pairs: Vec<(u64, u64)> = g
        .edges()
        .iter()
        .map(|&(u, v)| {
            let (a, b) = (ids.raw(u), ids.raw(v));
            (a.min(b), a.max(b))
        })
        .collect();
    pairs.sort_unstable();
    let mut hasher = Sha256::new();
    for (a, b) in pairs {
        hasher.update(a.to_le_bytes());
        hasher.update(b.to_le_bytes());
    }
    DatasetFingerprint {
        nodes: g.node_count(),
        edges: g.edge_count(),
        sha256: hex::encode(hasher.finalize()),
    }
}

pub fn checksum(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone)]
pub struct RunManifest {
    pub tool_version: String,
    pub experiment: String,
    pub config: Vec<(String, String)>,
    pub dataset: DatasetFingerprint,
    /// Output file name → sha256 of its bytes.
    pub outputs: Vec<(String, String)>,
}

impl RunManifest {
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str("# run manifest\n");
        out.push_str(&format!("tool-version={}\n", self.tool_version));
        out.push_str(&format!("experiment={}\n", self.experiment));
        for (k, v) in &self.config {
            out.push_str(&format!("config.{k}={v}\n"));
        }
        out.push_str(&format!("dataset.nodes={}\n", self.dataset.nodes));
        out.push_str(&format!("dataset.edges={}\n", self.dataset.edges));
        out.push_str(&format!("dataset.sha256={}\n", self.dataset.sha256));
        for (name, sum) in &self.outputs {
            out.push_str(&format!("output.{name}={sum}\n"));
        }
        out
    }
}

fn parse_fingerprint(text: &str) -> Option<DatasetFingerprint> {
    let mut nodes = None;
    let mut edges = None;
    let mut sha256 = None;
    for line in text.lines() {
        if let Some(v) = line.strip_prefix("dataset.nodes=") {
            nodes = v.parse().ok();
        } else if let Some(v) = line.strip_prefix("dataset.edges=") {
            edges = v.parse().ok();
        } else if let Some(v) = line.strip_prefix("dataset.sha256=") {
            sha256 = Some(v.to_string());
        }
    }
    Some(DatasetFingerprint {
        nodes: nodes?,
        edges: edges?,
        sha256: sha256?,
    })
}

/// Refuses to reuse an output directory whose manifest records a different
/// dataset than the one about to be processed.
pub fn guard_resume(out_dir: &Path, current: &DatasetFingerprint) -> Result<()> {
    let path = out_dir.join(MANIFEST_FILE);
    if !path.exists() {
        return Ok(());
    }
    let text = fs::read_to_string(&path).map_err(|source| Error::Io {
        path: path.clone(),
        source,
    })?;
    match parse_fingerprint(&text) {
        None => Ok(()), // unreadable manifest: treat as absent
        Some(previous) if previous == *current => Ok(()),
        Some(previous) => Err(Error::DatasetMismatch(format!(
            "{} was produced from a dataset with {} nodes / {} edges (hash {}...), \
             but the current input has {} nodes / {} edges (hash {}...)",
            path.display(),
            previous.nodes,
            previous.edges,
            &previous.sha256[..12.min(previous.sha256.len())],
            current.nodes,
            current.edges,
            &current.sha256[..12],
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NodeId;

    fn graph_and_ids(pairs: &[(NodeId, NodeId)]) -> (Graph, IdMap) {
        let n = pairs.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap() as usize;
        let g = Graph::from_pairs(n, pairs.iter().copied()).unwrap().0;
        let ids = IdMap::identity(n);
        (g, ids)
    }

    #[test]
    fn fingerprint_depends_on_edges_only() {
        let (g1, ids1) = graph_and_ids(&[(0, 1), (1, 2)]);
        let (g2, ids2) = graph_and_ids(&[(1, 2), (0, 1), (1, 0)]);
        assert_eq!(fingerprint(&g1, &ids1), fingerprint(&g2, &ids2));
        let (g3, ids3) = graph_and_ids(&[(0, 1), (1, 3)]);
        assert_ne!(fingerprint(&g1, &ids1), fingerprint(&g3, &ids3));
    }

    #[test]
    fn guard_detects_dataset_substitution() {
        let dir = tempfile::tempdir().unwrap();
        let (g, ids) = graph_and_ids(&[(0, 1), (1, 2)]);
        let fp = fingerprint(&g, &ids);
        // nothing there yet: fine
        guard_resume(dir.path(), &fp).unwrap();
        let manifest = RunManifest {
            tool_version: "0".into(),
            experiment: "strength".into(),
            config: vec![],
            dataset: fp.clone(),
            outputs: vec![],
        };
        fs::write(dir.path().join(MANIFEST_FILE), manifest.render()).unwrap();
        // same dataset: fine
        guard_resume(dir.path(), &fp).unwrap();
        // different dataset: aborts
        let (g2, ids2) = graph_and_ids(&[(0, 1), (1, 3)]);
        let err = guard_resume(dir.path(), &fingerprint(&g2, &ids2)).unwrap_err();
        assert!(matches!(err, Error::DatasetMismatch(_)));
    }

    #[test]
    fn render_round_trips_the_fingerprint() {
        let (g, ids) = graph_and_ids(&[(0, 1)]);
        let manifest = RunManifest {
            tool_version: "1.2.3".into(),
            experiment: "cdf".into(),
            config: vec![("grid-step".into(), "0.01".into())],
            dataset: fingerprint(&g, &ids),
            outputs: vec![("cdf.csv".into(), "abcd".into())],
        };
        let parsed = parse_fingerprint(&manifest.render()).unwrap();
        assert_eq!(parsed, manifest.dataset);
    }
}
