//! Synthetic graphs for desk-scale experiments: a preferential-attachment
//! generator and a planted-community generator whose sparse inter-community
//! bridges carry zero neighborhood overlap.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{connected_components, Graph, NodeId};

/// Preferential-attachment graph: each new node attaches to `min(m, existing)`
/// distinct earlier nodes chosen proportionally to their current degree.
/// Deterministic for a fixed seed. `m = 1` yields a tree.
pub fn generate_scale_free(n: usize, m: usize, seed: u64) -> Result<Graph> {
    if m < 1 || n <= m {
        return Err(Error::InvalidParameter(format!(
            "scale-free generator needs n > m >= 1, got n={n}, m={m}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // urn holds one entry per edge endpoint, so drawing from it is
    // degree-proportional; node 0 is seeded once to give the first node a target
    let mut urn: Vec<NodeId> = vec![0];
    let mut pairs = Vec::with_capacity(m * n);
    let mut picked: Vec<NodeId> = Vec::with_capacity(m);
    for v in 1..n as NodeId {
        let k = m.min(v as usize);
        picked.clear();
        while picked.len() < k {
            let t = urn[rng.gen_range(0..urn.len())];
            if !picked.contains(&t) {
                picked.push(t);
            }
        }
        for &t in &picked {
            pairs.push((v, t));
            urn.push(t);
            urn.push(v);
        }
    }
    let (graph, report) = Graph::from_pairs(n, pairs)?;
    debug_assert_eq!(report.self_loops + report.duplicates, 0);
    Ok(graph)
}

/// Planted-community graph: `c` blocks of `s` nodes, each intra-block pair
/// present with probability `p_in`, joined by `k_out` random inter-block
/// edges placed so the result is connected (a spanning tree over blocks
/// first, then extra bridges). Deterministic per seed; retries with derived
/// seeds when a block happens to come out internally disconnected.
pub fn generate_community_graph(
    c: usize,
    s: usize,
    p_in: f64,
    k_out: usize,
    seed: u64,
) -> Result<Graph> {
    if c < 2 || s < 3 {
        return Err(Error::InvalidParameter(format!(
            "community generator needs c >= 2 and s >= 3, got c={c}, s={s}"
        )));
    }
    if !(p_in > 0.0 && p_in <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "p_in must be in (0, 1], got {p_in}"
        )));
    }
    if k_out < c - 1 {
        return Err(Error::InvalidParameter(format!(
            "k_out must be at least c-1 to allow connectivity, got k_out={k_out}, c={c}"
        )));
    }

    const MAX_ATTEMPTS: u32 = 32;
    for attempt in 0..MAX_ATTEMPTS {
        let attempt_seed = crate::seeding::derive(seed, attempt as u64);
        let graph = community_attempt(c, s, p_in, k_out, attempt_seed)?;
        if connected_components(&graph).component_count() == 1 {
            return Ok(graph);
        }
    }
    Err(Error::ConnectFailed(MAX_ATTEMPTS))
}

fn community_attempt(c: usize, s: usize, p_in: f64, k_out: usize, seed: u64) -> Result<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = c * s;
    let mut pairs: Vec<(NodeId, NodeId)> = Vec::new();
    let node = |block: usize, i: usize| (block * s + i) as NodeId;

    for block in 0..c {
        for i in 0..s {
            for j in (i + 1)..s {
                if p_in >= 1.0 || rng.gen::<f64>() < p_in {
                    pairs.push((node(block, i), node(block, j)));
                }
            }
        }
    }

    // spanning tree over blocks guarantees quotient connectivity
    let mut block_order: Vec<usize> = (0..c).collect();
    block_order.shuffle(&mut rng);
    let mut bridges: Vec<(NodeId, NodeId)> = Vec::new();
    for idx in 1..c {
        let a = block_order[idx];
        let b = block_order[rng.gen_range(0..idx)];
        bridges.push((node(a, rng.gen_range(0..s)), node(b, rng.gen_range(0..s))));
    }
    let mut attempts = 0usize;
    while bridges.len() < k_out {
        attempts += 1;
        if attempts > 100 * k_out + 1000 {
            return Err(Error::InvalidParameter(
                "could not place the requested number of distinct inter-community edges".into(),
            ));
        }
        let a = rng.gen_range(0..c);
        let b = rng.gen_range(0..c);
        if a == b {
            continue;
        }
        let u = node(a, rng.gen_range(0..s));
        let v = node(b, rng.gen_range(0..s));
        let bridge = (u.min(v), u.max(v));
        if bridges.iter().any(|&(x, y)| (x.min(y), x.max(y)) == bridge) {
            continue;
        }
        bridges.push(bridge);
    }
    pairs.extend(bridges);

    Ok(Graph::from_pairs(n, pairs)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m_one_yields_tree() {
        let g = generate_scale_free(10, 1, 3).unwrap();
        assert_eq!(g.node_count(), 10);
        assert_eq!(g.edge_count(), 9);
        assert_eq!(connected_components(&g).component_count(), 1);
    }

    #[test]
    fn scale_free_is_deterministic_and_connected() {
        let a = generate_scale_free(1000, 3, 7).unwrap();
        let b = generate_scale_free(1000, 3, 7).unwrap();
        assert_eq!(a.edges(), b.edges());
        assert_eq!(connected_components(&a).component_count(), 1);
        // edge count: nodes 1..m attach with fewer than m edges
        assert_eq!(a.edge_count(), 3 * 999 - 3);
        assert_ne!(a.edges(), generate_scale_free(1000, 3, 8).unwrap().edges());
    }

    #[test]
    fn scale_free_degrees_are_heavy_tailed() {
        for seed in 0..20 {
            let g = generate_scale_free(1000, 3, seed).unwrap();
            let mean = 2.0 * g.edge_count() as f64 / g.node_count() as f64;
            let max = g.degrees().iter().copied().max().unwrap() as f64;
            assert!(
                max > 5.0 * mean,
                "seed {seed}: max degree {max} not heavy-tailed vs mean {mean}"
            );
        }
    }

    #[test]
    fn scale_free_rejects_bad_parameters() {
        assert!(generate_scale_free(3, 0, 0).is_err());
        assert!(generate_scale_free(3, 3, 0).is_err());
    }

    #[test]
    fn two_triangles_and_a_bridge() {
        let g = generate_community_graph(2, 3, 1.0, 1, 5).unwrap();
        assert_eq!(g.node_count(), 6);
        assert_eq!(g.edge_count(), 7);
        let bridge_count = g
            .edges()
            .iter()
            .filter(|&&(u, v)| (u / 3) != (v / 3))
            .count();
        assert_eq!(bridge_count, 1);
        assert_eq!(connected_components(&g).component_count(), 1);
    }

    #[test]
    fn community_graph_is_connected_and_deterministic() {
        let a = generate_community_graph(50, 20, 0.6, 120, 1).unwrap();
        assert_eq!(a.node_count(), 1000);
        assert_eq!(connected_components(&a).component_count(), 1);
        let b = generate_community_graph(50, 20, 0.6, 120, 1).unwrap();
        assert_eq!(a.edges(), b.edges());
    }

    #[test]
    fn community_rejects_bad_parameters() {
        assert!(generate_community_graph(1, 3, 0.5, 1, 0).is_err());
        assert!(generate_community_graph(2, 2, 0.5, 1, 0).is_err());
        assert!(generate_community_graph(2, 3, 0.0, 1, 0).is_err());
        assert!(generate_community_graph(2, 3, 1.5, 1, 0).is_err());
        assert!(generate_community_graph(3, 3, 0.5, 1, 0).is_err());
    }
}
