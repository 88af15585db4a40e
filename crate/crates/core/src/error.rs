//! Crate-wide error type.

use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::graph::NodeId;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}:{line}: {message}")]
    MalformedLine {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("edge list yields an empty graph")]
    EmptyGraph,
    #[error("graph has no edges")]
    EmptyEdgeSet,
    #[error("({0}, {1}) is not an edge of the graph")]
    NotAnEdge(NodeId, NodeId),
    #[error("node id {0} out of range for a graph with {1} nodes")]
    InvalidNode(NodeId, usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("generator produced a disconnected graph after {0} attempts")]
    ConnectFailed(u32),
    #[error("config: unknown key `{0}`")]
    UnknownKey(String),
    #[error("config: {0}")]
    Config(String),
    #[error("dataset mismatch: {0}")]
    DatasetMismatch(String),
}

impl Error {
    /// Whether the error is a usage problem (bad flags or config values)
    /// rather than a data or I/O problem. Drives the CLI exit code.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_) | Error::UnknownKey(_) | Error::Config(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
