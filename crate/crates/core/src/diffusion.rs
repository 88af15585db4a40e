//! Push/republish information cascades biased by tie strength.
//!
//! A piece of information starts at a seed node. Publishing a piece pushes
//! it to every neighbor (they now *know* it); a published node then samples
//! `k * beta` of its neighbors — stochastically rounded so the expectation
//! is exact — as candidate republishers, each drawn independently with
//! probability proportional to `max(w, epsilon)^alpha` over its ties.
//! `alpha = -1` prefers weak ties, `alpha = 0` is uniform and never touches
//! the strengths, `alpha = 1` prefers strong ties. Candidates that were ever
//! enqueued before are discarded (the draw is consumed); fresh ones join a
//! FIFO queue of future publishers.
//!
//! The clock `T` counts publish events: exactly one node publishes per tick,
//! so the published fraction is `T/N` until the cascade ends. A run stops
//! when the queue drains, when every node knows the information, or when the
//! event budget is exhausted.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId, UNREACHABLE};
use crate::seeding;
use crate::strength::StrengthTable;

/// Cascade model parameters.
#[derive(Debug, Clone, Copy)]
pub struct ModelParams {
    /// Navigating factor: exponent applied to tie strengths when choosing
    /// republishers.
    pub alpha: f64,
    /// Intrinsic attractiveness of the information, in [0, 1].
    pub beta: f64,
    /// Budget of publish events.
    pub t_max: TimeBudget,
    /// Substitute for zero strengths before exponentiation, so negative
    /// exponents give zero-strength ties maximal preference.
    pub epsilon: f64,
}

impl ModelParams {
    pub const DEFAULT_EPSILON: f64 = 1e-6;

    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let params = ModelParams {
            alpha,
            beta,
            t_max: TimeBudget::Unbounded,
            epsilon: Self::DEFAULT_EPSILON,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_t_max(mut self, t_max: TimeBudget) -> Self {
        self.t_max = t_max;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self> {
        self.epsilon = epsilon;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::InvalidParameter(format!(
                "beta must be in [0, 1], got {}",
                self.beta
            )));
        }
        if !self.alpha.is_finite() {
            return Err(Error::InvalidParameter("alpha must be finite".into()));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeBudget {
    Events(u64),
    Unbounded,
}

impl TimeBudget {
    fn reached(self, t: u64) -> bool {
        match self {
            TimeBudget::Events(max) => t >= max,
            TimeBudget::Unbounded => false,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum SeedChoice {
    Node(NodeId),
    Random,
}

/// The network a cascade runs on: CSR adjacency with the tie strength of
/// every slot. Built from the intact graph or from an edge-removed subset;
/// either way the slot strengths are the intact graph's values.
#[derive(Debug, Clone)]
pub struct StrengthGraph {
    node_count: usize,
    offsets: Vec<usize>,
    neighbors: Vec<NodeId>,
    strengths: Vec<f64>,
}

impl StrengthGraph {
    pub fn intact(g: &Graph, table: &StrengthTable) -> Self {
        Self::build(g, table, None)
    }

    /// Keeps only the edges whose `removed` flag is false.
    pub fn after_removal(g: &Graph, table: &StrengthTable, removed: &[bool]) -> Self {
        assert_eq!(removed.len(), g.edge_count());
        Self::build(g, table, Some(removed))
    }

    fn build(g: &Graph, table: &StrengthTable, removed: Option<&[bool]>) -> Self {
        assert_eq!(table.len(), g.edge_count());
        let n = g.node_count();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut neighbors = Vec::new();
        let mut strengths = Vec::new();
        offsets.push(0);
        for u in 0..n as NodeId {
            for (&v, &e) in g.neighbors(u).iter().zip(g.slot_edge_ids(u)) {
                if removed.map_or(false, |r| r[e as usize]) {
                    continue;
                }
                neighbors.push(v);
                strengths.push(table.strength(e as usize));
            }
            offsets.push(neighbors.len());
        }
        StrengthGraph {
            node_count: n,
            offsets,
            neighbors,
            strengths,
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn degree(&self, u: NodeId) -> usize {
        self.offsets[u as usize + 1] - self.offsets[u as usize]
    }

    pub fn neighbors(&self, u: NodeId) -> &[NodeId] {
        &self.neighbors[self.offsets[u as usize]..self.offsets[u as usize + 1]]
    }

    pub fn tie_strengths(&self, u: NodeId) -> &[f64] {
        &self.strengths[self.offsets[u as usize]..self.offsets[u as usize + 1]]
    }
}

/// Number of republishers drawn from a degree-`k` neighborhood:
/// `floor(k * beta)` plus a Bernoulli trial on the fractional remainder, so
/// the expectation is exactly `k * beta`.
pub fn republish_count<R: Rng + ?Sized>(degree: u32, beta: f64, rng: &mut R) -> u64 {
    let expected = degree as f64 * beta;
    let base = expected.floor();
    let fraction = expected - base;
    let mut count = base as u64;
    if fraction > 0.0 && rng.gen::<f64>() < fraction {
        count += 1;
    }
    count
}

/// Republisher-selection probabilities over the neighbors of `node`, in
/// adjacency order: proportional to `max(w, epsilon)^alpha`. `alpha = 0`
/// yields the uniform distribution without reading the strengths.
pub fn selection_weights(
    g: &Graph,
    table: &StrengthTable,
    node: NodeId,
    alpha: f64,
    epsilon: f64,
) -> Result<Vec<f64>> {
    let k = g.degree(node);
    if k == 0 {
        return Err(Error::InvalidParameter(format!(
            "node {node} has no neighbors to select from"
        )));
    }
    if alpha == 0.0 {
        return Ok(vec![1.0 / k as f64; k]);
    }
    let mut weights: Vec<f64> = g
        .slot_edge_ids(node)
        .iter()
        .map(|&e| table.strength(e as usize).max(epsilon).powf(alpha))
        .collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    Ok(weights)
}

/// Everything observed during one cascade.
#[derive(Debug, Clone)]
pub struct DiffusionRun {
    pub seed_node: NodeId,
    pub rng_seed: u64,
    /// Fraction of nodes that know the information, indexed by event tick
    /// (entry 0 is the state before the first publish).
    pub coverage: Vec<f64>,
    /// Fraction of nodes that have published, indexed by event tick.
    pub f_pub: Vec<f64>,
    /// Nodes in publish order.
    pub published: Vec<NodeId>,
    /// Republish generation of each published node (seed is generation 0).
    pub rounds: Vec<u32>,
    /// Final count of nodes that know the information.
    pub known: u64,
}

impl DiffusionRun {
    /// Number of publish events that happened.
    pub fn events(&self) -> u64 {
        self.published.len() as u64
    }

    pub fn final_coverage(&self) -> f64 {
        *self.coverage.last().expect("coverage is never empty")
    }
}

/// Runs one cascade on the intact graph.
pub fn run_diffusion(
    g: &Graph,
    table: &StrengthTable,
    params: &ModelParams,
    seed: SeedChoice,
    rng_seed: u64,
) -> Result<DiffusionRun> {
    run_diffusion_on(&StrengthGraph::intact(g, table), params, seed, rng_seed)
}

/// Runs one cascade on a prebuilt (possibly edge-removed) network.
pub fn run_diffusion_on(
    net: &StrengthGraph,
    params: &ModelParams,
    seed: SeedChoice,
    rng_seed: u64,
) -> Result<DiffusionRun> {
    params.validate()?;
    let n = net.node_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let seed_node = match seed {
        SeedChoice::Node(v) => {
            if v as usize >= n {
                return Err(Error::InvalidNode(v, n));
            }
            v
        }
        SeedChoice::Random => rng.gen_range(0..n) as NodeId,
    };

    let mut knows = vec![false; n];
    let mut enqueued = vec![false; n];
    knows[seed_node as usize] = true;
    enqueued[seed_node as usize] = true;
    let mut known: u64 = 1;

    let mut queue: VecDeque<(NodeId, u32)> = VecDeque::new();
    queue.push_back((seed_node, 0));

    let n_f = n as f64;
    let mut coverage = vec![known as f64 / n_f];
    let mut f_pub = vec![0.0];
    let mut published = Vec::new();
    let mut rounds = Vec::new();
    let mut cumulative: Vec<f64> = Vec::new();
    let mut t: u64 = 0;

    while !params.t_max.reached(t) {
        let Some((publisher, round)) = queue.pop_front() else {
            break;
        };
        for &v in net.neighbors(publisher) {
            if !knows[v as usize] {
                knows[v as usize] = true;
                known += 1;
            }
        }
        published.push(publisher);
        rounds.push(round);
        t += 1;
        coverage.push(known as f64 / n_f);
        f_pub.push(published.len() as f64 / n_f);

        let k = net.degree(publisher);
        if k > 0 {
            let draws = republish_count(k as u32, params.beta, &mut rng);
            if draws > 0 {
                let uniform = params.alpha == 0.0;
                if !uniform {
                    cumulative.clear();
                    let mut acc = 0.0;
                    for &w in net.tie_strengths(publisher) {
                        acc += w.max(params.epsilon).powf(params.alpha);
                        cumulative.push(acc);
                    }
                }
                for _ in 0..draws {
                    let slot = if uniform {
                        rng.gen_range(0..k)
                    } else {
                        let total = *cumulative.last().expect("degree checked above");
                        let u = rng.gen::<f64>() * total;
                        cumulative.partition_point(|&c| c <= u).min(k - 1)
                    };
                    let candidate = net.neighbors(publisher)[slot];
                    if !enqueued[candidate as usize] {
                        enqueued[candidate as usize] = true;
                        queue.push_back((candidate, round + 1));
                    }
                }
            }
        }

        if known as usize == n {
            break;
        }
    }

    Ok(DiffusionRun {
        seed_node,
        rng_seed,
        coverage,
        f_pub,
        published,
        rounds,
        known,
    })
}

/// Published fraction per BFS hop from the seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HopBin {
    pub hop: u32,
    pub ring_size: u64,
    pub published: u64,
}

impl HopBin {
    pub fn f_local(&self) -> f64 {
        if self.ring_size == 0 {
            0.0
        } else {
            self.published as f64 / self.ring_size as f64
        }
    }
}

/// Profiles how far publishing reached: for every hop distance with a
/// non-empty ring, the ring size and how many of its nodes published.
/// `rings` must come from the same network and the run's seed node.
pub fn f_local_profile(run: &DiffusionRun, rings: &[u32]) -> Vec<HopBin> {
    let max_hop = rings
        .iter()
        .copied()
        .filter(|&d| d != UNREACHABLE)
        .max()
        .unwrap_or(0);
    let mut bins: Vec<HopBin> = (0..=max_hop)
        .map(|hop| HopBin {
            hop,
            ring_size: 0,
            published: 0,
        })
        .collect();
    for &d in rings {
        if d != UNREACHABLE {
            bins[d as usize].ring_size += 1;
        }
    }
    for &p in &run.published {
        let d = rings[p as usize];
        if d != UNREACHABLE {
            bins[d as usize].published += 1;
        }
    }
    bins
}

/// Pools per-run hop profiles by summing ring and published counts per hop.
pub fn pool_profiles<I>(profiles: I) -> Vec<HopBin>
where
    I: IntoIterator<Item = Vec<HopBin>>,
{
    let mut pooled: Vec<HopBin> = Vec::new();
    for profile in profiles {
        while pooled.len() < profile.len() {
            pooled.push(HopBin {
                hop: pooled.len() as u32,
                ring_size: 0,
                published: 0,
            });
        }
        for bin in profile {
            pooled[bin.hop as usize].ring_size += bin.ring_size;
            pooled[bin.hop as usize].published += bin.published;
        }
    }
    pooled
}

/// Mean, standard error and sample count of a batch of observations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryStat {
    pub mean: f64,
    pub stderr: f64,
    pub n: u64,
}

impl SummaryStat {
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        assert!(n > 0, "no samples");
        let mean = samples.iter().sum::<f64>() / n as f64;
        let stderr = if n < 2 {
            0.0
        } else {
            let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>()
                / (n - 1) as f64;
            (var / n as f64).sqrt()
        };
        SummaryStat {
            mean,
            stderr,
            n: n as u64,
        }
    }
}

/// Runs independent replications with uniformly random seed nodes. Each
/// replication's RNG stream is derived from `(base_seed, index)`, so results
/// do not depend on scheduling order or worker count.
pub fn replicate_diffusions(
    net: &StrengthGraph,
    params: &ModelParams,
    replications: u64,
    base_seed: u64,
) -> Result<Vec<DiffusionRun>> {
    (0..replications)
        .into_par_iter()
        .map(|rep| {
            run_diffusion_on(
                net,
                params,
                SeedChoice::Random,
                seeding::derive(base_seed, rep),
            )
        })
        .collect()
}

/// Removes the first `floor(f_r * |E|)` edges of `order`, then measures the
/// mean final coverage over independent replications. Strengths seen by the
/// cascade are the intact graph's strengths restricted to surviving edges;
/// seed nodes are uniform over all nodes, including ones isolated by the
/// removal.
pub fn remove_then_diffuse(
    g: &Graph,
    table: &StrengthTable,
    order: &crate::percolation::RemovalOrder,
    f_r: f64,
    params: &ModelParams,
    replications: u64,
    base_seed: u64,
) -> Result<SummaryStat> {
    if !(0.0..=1.0).contains(&f_r) {
        return Err(Error::InvalidParameter(format!(
            "removal fraction must be in [0, 1], got {f_r}"
        )));
    }
    if params.t_max == TimeBudget::Unbounded {
        return Err(Error::InvalidParameter(
            "removal experiments need a finite event budget".into(),
        ));
    }
    if replications == 0 {
        return Err(Error::InvalidParameter(
            "at least one replication is required".into(),
        ));
    }
    let net = removed_network(g, table, order, f_r);
    let runs = replicate_diffusions(&net, params, replications, base_seed)?;
    let finals: Vec<f64> = runs.iter().map(DiffusionRun::final_coverage).collect();
    Ok(SummaryStat::from_samples(&finals))
}

/// Survivor network after removing the first `floor(f_r * |E|)` edges of `order`.
pub fn removed_network(
    g: &Graph,
    table: &StrengthTable,
    order: &crate::percolation::RemovalOrder,
    f_r: f64,
) -> StrengthGraph {
    let removed_count = ((f_r * g.edge_count() as f64).floor() as usize).min(g.edge_count());
    let mut removed = vec![false; g.edge_count()];
    for &e in &order.permutation()[..removed_count] {
        removed[e as usize] = true;
    }
    StrengthGraph::after_removal(g, table, &removed)
}
