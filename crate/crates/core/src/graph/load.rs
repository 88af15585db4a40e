//! Edge-list ingestion and export.
//!
//! The accepted format is UTF-8 text with one edge per line: two integer
//! tokens separated by whitespace (or a configured delimiter), comment lines
//! starting with a configurable prefix. Raw file ids may be arbitrary
//! non-negative integers; they are densified to `0..n` in first-appearance
//! order and the mapping is kept for reporting.

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

/// Bijective raw-id ⇄ dense-id mapping.
#[derive(Debug, Clone)]
pub struct IdMap {
    forward: HashMap<u64, NodeId>,
    reverse: Vec<u64>,
}

impl IdMap {
    fn new() -> Self {
        IdMap {
            forward: HashMap::new(),
            reverse: Vec::new(),
        }
    }

    /// Identity mapping for graphs born with dense ids (generators).
    pub fn identity(n: usize) -> Self {
        IdMap {
            forward: (0..n).map(|i| (i as u64, i as NodeId)).collect(),
            reverse: (0..n as u64).collect(),
        }
    }

    fn intern(&mut self, raw: u64) -> NodeId {
        if let Some(&dense) = self.forward.get(&raw) {
            return dense;
        }
        let dense = self.reverse.len() as NodeId;
        self.forward.insert(raw, dense);
        self.reverse.push(raw);
        dense
    }

    pub fn dense(&self, raw: u64) -> Option<NodeId> {
        self.forward.get(&raw).copied()
    }

    pub fn raw(&self, dense: NodeId) -> u64 {
        self.reverse[dense as usize]
    }

    pub fn len(&self) -> usize {
        self.reverse.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reverse.is_empty()
    }
}

/// Parsing options for [`load_edge_list`].
#[derive(Debug, Clone)]
pub struct LoadOptions {
    /// Lines starting with this prefix are ignored.
    pub comment_prefix: String,
    /// Token separator; `None` splits on any ASCII whitespace.
    pub delimiter: Option<char>,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            comment_prefix: "#".into(),
            delimiter: None,
        }
    }
}

/// What the loader saw and dropped.
#[derive(Debug, Clone, Copy, Default)]
pub struct LoadReport {
    pub lines: usize,
    pub comment_lines: usize,
    pub self_loops_dropped: usize,
    pub duplicates_merged: usize,
}

/// Loads a canonical simple graph from an edge-list file.
pub fn load_edge_list(path: &Path, options: &LoadOptions) -> Result<(Graph, IdMap, LoadReport)> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let reader = BufReader::new(file);

    let mut ids = IdMap::new();
    let mut pairs: Vec<(NodeId, NodeId)> = Vec::new();
    let mut report = LoadReport::default();

    for (index, line) in reader.lines().enumerate() {
        let line_no = index + 1;
        let line = line.map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        report.lines += 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with(&options.comment_prefix) {
            report.comment_lines += 1;
            continue;
        }
        let mut tokens = match options.delimiter {
            Some(d) => trimmed.split(d).filter(|t| !t.is_empty()).take(3).collect::<Vec<_>>(),
            None => trimmed.split_whitespace().take(3).collect::<Vec<_>>(),
        };
        if tokens.len() != 2 {
            return Err(Error::MalformedLine {
                path: path.to_path_buf(),
                line: line_no,
                message: format!("expected two integer tokens, got {}", tokens.len()),
            });
        }
        let parse = |t: &str| -> Result<u64> {
            t.parse::<u64>().map_err(|_| Error::MalformedLine {
                path: path.to_path_buf(),
                line: line_no,
                message: format!("`{t}` is not a non-negative integer"),
            })
        };
        let raw_v = parse(tokens.pop().unwrap())?;
        let raw_u = parse(tokens.pop().unwrap())?;
        pairs.push((ids.intern(raw_u), ids.intern(raw_v)));
    }

    if pairs.is_empty() {
        return Err(Error::EmptyGraph);
    }

    let (graph, canon) = Graph::from_pairs(ids.len(), pairs)?;
    report.self_loops_dropped = canon.self_loops;
    report.duplicates_merged = canon.duplicates;
    Ok((graph, ids, report))
}

/// Writes the canonical edge set back out, one `raw_u raw_v` line per edge.
pub fn write_edge_list<W: Write>(g: &Graph, ids: &IdMap, w: &mut W) -> io::Result<()> {
    for &(u, v) in g.edges() {
        writeln!(w, "{} {}", ids.raw(u), ids.raw(v))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write as _;

    fn load_str(content: &str, options: &LoadOptions) -> Result<(Graph, IdMap, LoadReport)> {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        file.write_all(content.as_bytes()).unwrap();
        load_edge_list(file.path(), options)
    }

    #[test]
    fn loads_and_canonicalizes() {
        let (g, ids, report) = load_str("1 2\n2 1\n1 1\n", &LoadOptions::default()).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(report.self_loops_dropped, 1);
        assert_eq!(report.duplicates_merged, 1);
        assert_eq!(ids.raw(0), 1);
        assert_eq!(ids.dense(2), Some(1));
    }

    #[test]
    fn skips_comments_and_sparse_ids() {
        let (g, ids, report) =
            load_str("# a comment\n\n10 500\n500 99\n", &LoadOptions::default()).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(report.comment_lines, 2);
        assert_eq!(ids.raw(1), 500);
    }

    #[test]
    fn custom_delimiter() {
        let options = LoadOptions {
            comment_prefix: "%".into(),
            delimiter: Some(','),
        };
        let (g, _, _) = load_str("% header\n0,1\n1,2\n", &options).unwrap();
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn malformed_line_reports_number() {
        let err = load_str("1 2\nx 3\n", &LoadOptions::default()).unwrap_err();
        match err {
            Error::MalformedLine { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
        let err = load_str("1 2 3\n", &LoadOptions::default()).unwrap_err();
        assert!(matches!(err, Error::MalformedLine { line: 1, .. }));
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(
            load_str("# nothing here\n", &LoadOptions::default()),
            Err(Error::EmptyGraph)
        ));
        assert!(load_edge_list(Path::new("/no/such/file"), &LoadOptions::default()).is_err());
    }

    #[test]
    fn round_trip_preserves_canonical_edges() {
        let (g, ids, _) = load_str("7 3\n3 9\n9 7\n7 7\n3 7\n", &LoadOptions::default()).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&g, &ids, &mut buf).unwrap();
        let (g2, ids2, report) =
            load_str(std::str::from_utf8(&buf).unwrap(), &LoadOptions::default()).unwrap();
        assert_eq!(report.self_loops_dropped, 0);
        assert_eq!(report.duplicates_merged, 0);
        let raw =
            |g: &Graph, ids: &IdMap| -> Vec<(u64, u64)> {
                let mut out: Vec<(u64, u64)> = g
                    .edges()
                    .iter()
                    .map(|&(u, v)| {
                        let (a, b) = (ids.raw(u), ids.raw(v));
                        (a.min(b), a.max(b))
                    })
                    .collect();
                out.sort_unstable();
                out
            };
        assert_eq!(raw(&g, &ids), raw(&g2, &ids2));
    }
}
