//! Immutable undirected simple graph with dense node ids, plus the
//! structural primitives (components, BFS rings) the analyses build on.

mod generate;
mod load;

pub use generate::{generate_community_graph, generate_scale_free};
pub use load::{load_edge_list, write_edge_list, IdMap, LoadOptions, LoadReport};

use crate::error::{Error, Result};

pub type NodeId = u32;

/// Hop distance assigned by [`bfs_rings`] to nodes outside the source's component.
pub const UNREACHABLE: u32 = u32::MAX;

/// Counts of inputs dropped while canonicalizing an edge set.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CanonReport {
    pub self_loops: usize,
    pub duplicates: usize,
}

/// Undirected simple graph.
///
/// Node ids are dense integers `0..node_count`. Edges are stored once as
/// canonical `(low, high)` pairs sorted lexicographically; adjacency is a CSR
/// layout with per-node sorted neighbor lists. The structure is immutable
/// after construction, so it can be shared read-only across worker threads.
/// Removal experiments operate on edge-subset views, never by mutation.
#[derive(Debug, Clone)]
pub struct Graph {
    node_count: usize,
    edges: Vec<(NodeId, NodeId)>,
    offsets: Vec<usize>,
    neighbors: Vec<NodeId>,
    slot_edges: Vec<u32>,
    degrees: Vec<u32>,
}

impl Graph {
    /// Builds a canonical simple graph from raw node pairs.
    ///
    /// Self-loops are dropped and duplicate/reversed pairs merged; the counts
    /// end up in the returned [`CanonReport`]. Ids must be `< node_count`.
    pub fn from_pairs<I>(node_count: usize, pairs: I) -> Result<(Self, CanonReport)>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut report = CanonReport::default();
        let mut edges = Vec::new();
        for (u, v) in pairs {
            let hi = u.max(v);
            if (hi as usize) >= node_count {
                return Err(Error::InvalidNode(hi, node_count));
            }
            if u == v {
                report.self_loops += 1;
                continue;
            }
            edges.push((u.min(v), hi));
        }
        edges.sort_unstable();
        let before = edges.len();
        edges.dedup();
        report.duplicates = before - edges.len();

        if edges.len() > u32::MAX as usize {
            return Err(Error::InvalidParameter("too many edges".into()));
        }

        let mut degrees = vec![0u32; node_count];
        for &(u, v) in &edges {
            degrees[u as usize] += 1;
            degrees[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(node_count + 1);
        let mut acc = 0usize;
        offsets.push(0);
        for &d in &degrees {
            acc += d as usize;
            offsets.push(acc);
        }
        // Cursor fill over lexicographically sorted edges leaves every
        // node's neighbor slice already sorted: edges (w,u) with w<u arrive
        // before edges (u,v) with v>u, each group in ascending order.
        let mut cursor: Vec<usize> = offsets[..node_count].to_vec();
        let mut neighbors = vec![0 as NodeId; acc];
        let mut slot_edges = vec![0u32; acc];
        for (e, &(u, v)) in edges.iter().enumerate() {
            neighbors[cursor[u as usize]] = v;
            slot_edges[cursor[u as usize]] = e as u32;
            cursor[u as usize] += 1;
            neighbors[cursor[v as usize]] = u;
            slot_edges[cursor[v as usize]] = e as u32;
            cursor[v as usize] += 1;
        }

        Ok((
            Graph {
                node_count,
                edges,
                offsets,
                neighbors,
                slot_edges,
                degrees,
            },
            report,
        ))
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Canonical `(low, high)` edges, sorted lexicographically.
    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    /// Sorted neighbor list of `u`.
    pub fn neighbors(&self, u: NodeId) -> &[NodeId] {
        let u = u as usize;
        &self.neighbors[self.offsets[u]..self.offsets[u + 1]]
    }

    /// Edge index of each adjacency slot of `u`, parallel to [`Self::neighbors`].
    pub fn slot_edge_ids(&self, u: NodeId) -> &[u32] {
        let u = u as usize;
        &self.slot_edges[self.offsets[u]..self.offsets[u + 1]]
    }

    pub fn degree(&self, u: NodeId) -> usize {
        self.degrees[u as usize] as usize
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    /// Index of edge `(u, v)` in [`Self::edges`], if present.
    pub fn edge_index(&self, u: NodeId, v: NodeId) -> Option<usize> {
        let pair = (u.min(v), u.max(v));
        self.edges.binary_search(&pair).ok()
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.edge_index(u, v).is_some()
    }

    fn check_node(&self, u: NodeId) -> Result<()> {
        if (u as usize) < self.node_count {
            Ok(())
        } else {
            Err(Error::InvalidNode(u, self.node_count))
        }
    }
}

/// Partition of the nodes into connected components.
#[derive(Debug, Clone)]
pub struct ComponentLabeling {
    labels: Vec<u32>,
    sizes: Vec<u64>,
}

impl ComponentLabeling {
    /// Component id per node.
    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn label(&self, u: NodeId) -> u32 {
        self.labels[u as usize]
    }

    /// Size of each component, indexed by component id.
    pub fn sizes(&self) -> &[u64] {
        &self.sizes
    }

    pub fn component_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn largest_size(&self) -> u64 {
        self.sizes.iter().copied().max().unwrap_or(0)
    }
}

/// Labels connected components by BFS in node-id order.
pub fn connected_components(g: &Graph) -> ComponentLabeling {
    let n = g.node_count();
    let mut labels = vec![u32::MAX; n];
    let mut sizes = Vec::new();
    let mut queue = Vec::new();
    for start in 0..n {
        if labels[start] != u32::MAX {
            continue;
        }
        let comp = sizes.len() as u32;
        let mut size = 0u64;
        labels[start] = comp;
        queue.push(start as NodeId);
        while let Some(u) = queue.pop() {
            size += 1;
            for &v in g.neighbors(u) {
                if labels[v as usize] == u32::MAX {
                    labels[v as usize] = comp;
                    queue.push(v);
                }
            }
        }
        sizes.push(size);
    }
    ComponentLabeling { labels, sizes }
}

/// Hop distance from `source` to every node; [`UNREACHABLE`] outside its component.
pub fn bfs_rings(g: &Graph, source: NodeId) -> Result<Vec<u32>> {
    g.check_node(source)?;
    let mut dist = vec![UNREACHABLE; g.node_count()];
    dist[source as usize] = 0;
    let mut frontier = vec![source];
    let mut next = Vec::new();
    let mut hop = 0u32;
    while !frontier.is_empty() {
        hop += 1;
        for &u in &frontier {
            for &v in g.neighbors(u) {
                if dist[v as usize] == UNREACHABLE {
                    dist[v as usize] = hop;
                    next.push(v);
                }
            }
        }
        frontier.clear();
        std::mem::swap(&mut frontier, &mut next);
    }
    Ok(dist)
}
