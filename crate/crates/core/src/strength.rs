//! Neighborhood-overlap strength of ties.
//!
//! The strength of an edge (i, j) is the relative overlap of the endpoints'
//! neighborhoods: `c / (k_i - 1 + k_j - 1 - c)` where `c` counts common
//! neighbors. It is 1 on edges whose endpoints share all other contacts
//! (e.g. every edge of a complete graph on three or more nodes) and 0 on
//! bridges with no shared contacts. An isolated dyad has a zero denominator;
//! it gets strength 0 with a `degenerate` flag so downstream consumers can
//! tell the two zero cases apart.
//!
//! Strengths are computed once on the intact graph and never recomputed
//! after edge removals: removal experiments rank ties by their original
//! embedding.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

/// Per-edge strength table, indexed like [`Graph::edges`].
#[derive(Debug, Clone)]
pub struct StrengthTable {
    strengths: Vec<f64>,
    common: Vec<u32>,
    degenerate: Vec<bool>,
}

impl StrengthTable {
    pub fn len(&self) -> usize {
        self.strengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strengths.is_empty()
    }

    pub fn strength(&self, edge: usize) -> f64 {
        self.strengths[edge]
    }

    pub fn strengths(&self) -> &[f64] {
        &self.strengths
    }

    pub fn common_neighbors(&self, edge: usize) -> u32 {
        self.common[edge]
    }

    pub fn is_degenerate(&self, edge: usize) -> bool {
        self.degenerate[edge]
    }

    /// Builds a table directly from per-edge values (test support).
    pub fn from_raw(strengths: Vec<f64>, common: Vec<u32>, degenerate: Vec<bool>) -> Self {
        assert_eq!(strengths.len(), common.len());
        assert_eq!(strengths.len(), degenerate.len());
        StrengthTable {
            strengths,
            common,
            degenerate,
        }
    }
}

/// Strength of a single edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeStrength {
    pub strength: f64,
    pub common_neighbors: u32,
    pub degenerate: bool,
}

fn intersection_size(a: &[NodeId], b: &[NodeId]) -> u32 {
    let mut count = 0;
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

fn strength_of(g: &Graph, u: NodeId, v: NodeId) -> EdgeStrength {
    let c = intersection_size(g.neighbors(u), g.neighbors(v));
    // c <= min(k_u, k_v) - 1 for adjacent nodes, so the denominator is
    // non-negative and zero exactly for the isolated dyad k_u = k_v = 1
    let denom = g.degree(u) + g.degree(v) - 2 - c as usize;
    if denom == 0 {
        EdgeStrength {
            strength: 0.0,
            common_neighbors: c,
            degenerate: true,
        }
    } else {
        EdgeStrength {
            strength: c as f64 / denom as f64,
            common_neighbors: c,
            degenerate: false,
        }
    }
}

/// Strength of the tie (u, v). Errors if (u, v) is not an edge.
pub fn edge_strength(g: &Graph, u: NodeId, v: NodeId) -> Result<EdgeStrength> {
    if !g.has_edge(u, v) {
        return Err(Error::NotAnEdge(u, v));
    }
    Ok(strength_of(g, u, v))
}

/// Strength of every edge, computed by sorted-adjacency intersection.
pub fn all_strengths(g: &Graph) -> StrengthTable {
    let values: Vec<EdgeStrength> = g
        .edges()
        .par_iter()
        .map(|&(u, v)| strength_of(g, u, v))
        .collect();
    StrengthTable {
        strengths: values.iter().map(|e| e.strength).collect(),
        common: values.iter().map(|e| e.common_neighbors).collect(),
        degenerate: values.iter().map(|e| e.degenerate).collect(),
    }
}

/// Cumulative fraction of edges with strength at or below each threshold.
///
/// `grid` must be sorted ascending; the table must be non-empty.
pub fn strength_cdf(table: &StrengthTable, grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    if table.is_empty() {
        return Err(Error::EmptyEdgeSet);
    }
    if grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidParameter(
            "cdf grid must be sorted ascending".into(),
        ));
    }
    let mut sorted = table.strengths.clone();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len() as f64;
    Ok(grid
        .iter()
        .map(|&t| {
            let below = sorted.partition_point(|&w| w <= t);
            (t, below as f64 / n)
        })
        .collect())
}

/// Kendall tau-b rank correlation between neighbor degree and tie strength.
///
/// Every directed neighbor observation i→j contributes the pair
/// `(degree(j), strength(i, j))`, so each edge is seen from both ends.
/// Returns `Ok(None)` when the statistic is undefined (all degrees or all
/// strengths tied). Needs at least two edges.
pub fn degree_strength_correlation(g: &Graph, table: &StrengthTable) -> Result<Option<f64>> {
    if g.edge_count() < 2 {
        return Err(Error::InvalidParameter(
            "degree-strength correlation needs at least two edges".into(),
        ));
    }
    let mut xs: Vec<u32> = Vec::with_capacity(2 * g.edge_count());
    let mut ys: Vec<f64> = Vec::with_capacity(2 * g.edge_count());
    for u in 0..g.node_count() as NodeId {
        for (&j, &e) in g.neighbors(u).iter().zip(g.slot_edge_ids(u)) {
            xs.push(g.degree(j) as u32);
            ys.push(table.strength(e as usize));
        }
    }
    Ok(kendall_tau_b(&xs, &ys))
}

/// Kendall tau-b over (x, y) pairs in O(n log n) by inversion counting.
fn kendall_tau_b(xs: &[u32], ys: &[f64]) -> Option<f64> {
    let n = xs.len();
    if n < 2 {
        return None;
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_unstable_by(|&a, &b| xs[a].cmp(&xs[b]).then(ys[a].total_cmp(&ys[b])));

    let pairs = |t: u64| t * (t.saturating_sub(1)) / 2;
    let n0 = pairs(n as u64);

    // ties in x and joint ties, over the x-then-y sorted order
    let mut n1 = 0u64;
    let mut n3 = 0u64;
    let mut run_x = 1u64;
    let mut run_xy = 1u64;
    for w in idx.windows(2) {
        let same_x = xs[w[0]] == xs[w[1]];
        let same_xy = same_x && ys[w[0]] == ys[w[1]];
        if same_x {
            run_x += 1;
        } else {
            n1 += pairs(run_x);
            run_x = 1;
        }
        if same_xy {
            run_xy += 1;
        } else {
            n3 += pairs(run_xy);
            run_xy = 1;
        }
    }
    n1 += pairs(run_x);
    n3 += pairs(run_xy);

    // ties in y
    let mut y_sorted = ys.to_vec();
    y_sorted.sort_unstable_by(f64::total_cmp);
    let mut n2 = 0u64;
    let mut run_y = 1u64;
    for w in y_sorted.windows(2) {
        if w[0] == w[1] {
            run_y += 1;
        } else {
            n2 += pairs(run_y);
            run_y = 1;
        }
    }
    n2 += pairs(run_y);

    if n0 == n1 || n0 == n2 {
        return None;
    }

    // discordant pairs = strict inversions of y in the x-sorted sequence;
    // within an x-tie block y is ascending, so those pairs never count
    let mut y_in_x_order: Vec<f64> = idx.iter().map(|&i| ys[i]).collect();
    let swaps = count_inversions(&mut y_in_x_order);

    let s = n0 as i128 - n1 as i128 - n2 as i128 + n3 as i128 - 2 * swaps as i128;
    let denom = ((n0 - n1) as f64).sqrt() * ((n0 - n2) as f64).sqrt();
    Some(s as f64 / denom)
}

/// Counts pairs i < j with v[i] > v[j] via bottom-up merge sort.
fn count_inversions(v: &mut [f64]) -> u64 {
    let n = v.len();
    let mut buf = vec![0.0f64; n];
    let mut inversions = 0u64;
    let mut width = 1;
    while width < n {
        let mut lo = 0;
        while lo + width < n {
            let mid = lo + width;
            let hi = (mid + width).min(n);
            let (mut i, mut j, mut k) = (lo, mid, lo);
            while i < mid && j < hi {
                if v[i] <= v[j] {
                    buf[k] = v[i];
                    i += 1;
                } else {
                    inversions += (mid - i) as u64;
                    buf[k] = v[j];
                    j += 1;
                }
                k += 1;
            }
            buf[k..k + (mid - i)].copy_from_slice(&v[i..mid]);
            let k = k + (mid - i);
            buf[k..k + (hi - j)].copy_from_slice(&v[j..hi]);
            v[lo..hi].copy_from_slice(&buf[lo..hi]);
            lo = hi;
        }
        width *= 2;
    }
    inversions
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, pairs: &[(NodeId, NodeId)]) -> Graph {
        Graph::from_pairs(n, pairs.iter().copied()).unwrap().0
    }

    /// triangle 0-1-2 with pendant 3 hanging off node 2
    fn triangle_plus_pendant() -> Graph {
        graph(4, &[(0, 1), (1, 2), (2, 0), (2, 3)])
    }

    #[test]
    fn triangle_edges_have_full_strength() {
        let g = graph(3, &[(0, 1), (1, 2), (2, 0)]);
        for &(u, v) in g.edges() {
            let e = edge_strength(&g, u, v).unwrap();
            assert_eq!(e.strength, 1.0);
            assert_eq!(e.common_neighbors, 1);
            assert!(!e.degenerate);
        }
    }

    #[test]
    fn pendant_and_shared_edges() {
        let g = triangle_plus_pendant();
        let pendant = edge_strength(&g, 2, 3).unwrap();
        assert_eq!(pendant.strength, 0.0);
        assert_eq!(pendant.common_neighbors, 0);
        assert!(!pendant.degenerate);

        let shared = edge_strength(&g, 0, 2).unwrap();
        assert_eq!(shared.common_neighbors, 1);
        assert_eq!(shared.strength, 0.5);
    }

    #[test]
    fn isolated_dyad_is_degenerate() {
        let g = graph(2, &[(0, 1)]);
        let e = edge_strength(&g, 0, 1).unwrap();
        assert_eq!(e.strength, 0.0);
        assert!(e.degenerate);
    }

    #[test]
    fn non_edge_is_rejected() {
        let g = triangle_plus_pendant();
        assert!(matches!(
            edge_strength(&g, 0, 3),
            Err(Error::NotAnEdge(0, 3))
        ));
    }

    #[test]
    fn complete_graph_strengths() {
        let mut pairs = Vec::new();
        for i in 0..4u32 {
            for j in (i + 1)..4 {
                pairs.push((i, j));
            }
        }
        let g = graph(4, &pairs);
        let table = all_strengths(&g);
        assert_eq!(table.len(), 6);
        assert!(table.strengths().iter().all(|&w| w == 1.0));
    }

    #[test]
    fn path_strengths_are_zero() {
        let g = graph(3, &[(0, 1), (1, 2)]);
        let table = all_strengths(&g);
        assert!(table.strengths().iter().all(|&w| w == 0.0));
        assert!(!table.is_degenerate(0));
    }

    #[test]
    fn all_strengths_matches_edge_strength() {
        let g = crate::graph::generate_community_graph(4, 6, 0.7, 5, 11).unwrap();
        let table = all_strengths(&g);
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            let single = edge_strength(&g, u, v).unwrap();
            assert_eq!(single.strength, table.strength(e));
            assert_eq!(single.common_neighbors, table.common_neighbors(e));
            assert_eq!(single.degenerate, table.is_degenerate(e));
        }
    }

    #[test]
    fn inverse_strength_identity() {
        // 1/w == (k_i - 2)/c + k_j/c - 1 whenever c > 0
        let g = crate::graph::generate_community_graph(3, 8, 0.8, 4, 2).unwrap();
        let table = all_strengths(&g);
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            let c = table.common_neighbors(e) as f64;
            if c == 0.0 {
                continue;
            }
            let (ki, kj) = (g.degree(u) as f64, g.degree(v) as f64);
            let lhs = 1.0 / table.strength(e);
            let rhs = (ki - 2.0) / c + kj / c - 1.0;
            assert!((lhs - rhs).abs() < 1e-9 * lhs.abs().max(1.0));
        }
    }

    #[test]
    fn cdf_counts_fractions() {
        let table = StrengthTable::from_raw(
            vec![0.0, 0.5, 1.0, 1.0],
            vec![0; 4],
            vec![false; 4],
        );
        let cdf = strength_cdf(&table, &[0.0, 0.5, 1.0]).unwrap();
        assert_eq!(cdf, vec![(0.0, 0.25), (0.5, 0.5), (1.0, 1.0)]);
    }

    #[test]
    fn cdf_edge_cases() {
        let table = StrengthTable::from_raw(vec![0.4, 0.4], vec![0; 2], vec![false; 2]);
        assert_eq!(strength_cdf(&table, &[0.4]).unwrap(), vec![(0.4, 1.0)]);
        assert_eq!(strength_cdf(&table, &[0.1]).unwrap(), vec![(0.1, 0.0)]);
        assert!(strength_cdf(&table, &[0.5, 0.1]).is_err());
        let empty = StrengthTable::from_raw(vec![], vec![], vec![]);
        assert!(matches!(
            strength_cdf(&empty, &[0.5]),
            Err(Error::EmptyEdgeSet)
        ));
    }

    /// Brute-force concordance count over all observation pairs.
    fn naive_tau_b(xs: &[u32], ys: &[f64]) -> Option<f64> {
        let n = xs.len();
        let (mut s, mut tx, mut ty) = (0i64, 0u64, 0u64);
        for i in 0..n {
            for j in (i + 1)..n {
                let dx = (xs[i] as i64 - xs[j] as i64).signum();
                let dy = match ys[i].partial_cmp(&ys[j]).unwrap() {
                    std::cmp::Ordering::Less => -1,
                    std::cmp::Ordering::Equal => 0,
                    std::cmp::Ordering::Greater => 1,
                };
                s += dx * dy;
                if dx == 0 {
                    tx += 1;
                }
                if dy == 0 {
                    ty += 1;
                }
            }
        }
        let n0 = (n * (n - 1) / 2) as u64;
        if tx == n0 || ty == n0 {
            return None;
        }
        Some(s as f64 / (((n0 - tx) as f64).sqrt() * ((n0 - ty) as f64).sqrt()))
    }

    #[test]
    fn correlation_on_triangle_plus_pendant_matches_pair_enumeration() {
        let g = triangle_plus_pendant();
        let table = all_strengths(&g);
        let tau = degree_strength_correlation(&g, &table).unwrap().unwrap();

        // cross-check against the brute-force oracle on the same observations
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for u in 0..g.node_count() as NodeId {
            for (&j, &e) in g.neighbors(u).iter().zip(g.slot_edge_ids(u)) {
                xs.push(g.degree(j) as u32);
                ys.push(table.strength(e as usize));
            }
        }
        assert_eq!(xs.len(), 8);
        let expected = naive_tau_b(&xs, &ys).unwrap();
        assert!((tau - expected).abs() < 1e-12);
        // enumerating the 28 pairs by hand: 6 concordant, 8 discordant,
        // 9 ties in degree, 8 in strength -> -2 / sqrt(19 * 20)
        let by_hand = -2.0 / (19.0f64 * 20.0).sqrt();
        assert!((tau - by_hand).abs() < 1e-12, "{tau} vs {by_hand}");
    }

    #[test]
    fn correlation_undefined_when_all_tied() {
        // all strengths equal (complete graph)
        let mut pairs = Vec::new();
        for i in 0..5u32 {
            for j in (i + 1)..5 {
                pairs.push((i, j));
            }
        }
        let g = graph(5, &pairs);
        let table = all_strengths(&g);
        assert_eq!(degree_strength_correlation(&g, &table).unwrap(), None);

        let single = graph(2, &[(0, 1)]);
        let t = all_strengths(&single);
        assert!(degree_strength_correlation(&single, &t).is_err());
    }

    #[test]
    fn correlation_positive_on_community_graph() {
        let g = crate::graph::generate_community_graph(10, 12, 0.8, 20, 3).unwrap();
        let table = all_strengths(&g);
        let tau = degree_strength_correlation(&g, &table).unwrap().unwrap();
        assert!(tau > 0.0, "expected positive correlation, got {tau}");
    }

    #[test]
    fn kendall_matches_naive_on_randomish_data() {
        // deterministic pseudo-random observations with plenty of ties
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        let mut state = 12345u64;
        for _ in 0..200 {
            state = crate::seeding::splitmix64(state);
            xs.push((state % 7) as u32);
            ys.push(((state >> 32) % 5) as f64 / 4.0);
        }
        let fast = kendall_tau_b(&xs, &ys).unwrap();
        let slow = naive_tau_b(&xs, &ys).unwrap();
        assert!((fast - slow).abs() < 1e-12, "{fast} vs {slow}");
    }
}
