//! Brute-force ground truth on small graphs.
//!
//! Everything here enumerates: node subsets for dense subgraphs, simple
//! paths for routing, cliques by subset search. Measures are re-evaluated
//! on bitmasks with their own code (edge connectivity via Menger path
//! counting) so the oracle shares no algorithm with the fast path it
//! checks.

use serde::Serialize;

use crate::dense::{DenseCover, Exactness};
use crate::density::{DensityValue, Measure, MeasureExpr, MAX_CLIQUE_K};
use crate::error::{Error, Result};
use crate::graph::{congested_core, Graph, LoadedGraph, NodeId, SubgraphRef};
use crate::routing::{NoPathReason, Path, RouteOutcome, WeightPolicy};

/// Largest graph whose node subsets are enumerated.
pub const MAX_SUBSET_NODES: usize = 15;
/// Largest graph whose simple paths are enumerated.
pub const MAX_PATH_NODES: usize = 12;

fn check_size(g: &Graph, limit: usize) -> Result<()> {
    if g.node_count() > limit {
        return Err(Error::TooLarge { nodes: g.node_count(), limit });
    }
    Ok(())
}

/// Bitmask adjacency of a graph with at most 32 nodes.
#[derive(Debug, Clone)]
pub struct MaskGraph {
    adj: Vec<u32>,
}

impl MaskGraph {
    pub fn new(g: &Graph) -> Self {
        assert!(g.node_count() <= 32);
        let mut adj = vec![0u32; g.node_count()];
        for &(u, v) in g.edges() {
            adj[u.0] |= 1 << v.0;
            adj[v.0] |= 1 << u.0;
        }
        MaskGraph { adj }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    fn members(mask: u32) -> impl Iterator<Item = usize> {
        (0..32).filter(move |i| mask & (1 << i) != 0)
    }

    fn degree_in(&self, v: usize, mask: u32) -> u32 {
        (self.adj[v] & mask).count_ones()
    }

    pub fn edges_in(&self, mask: u32) -> u32 {
        Self::members(mask).map(|v| self.degree_in(v, mask)).sum::<u32>() / 2
    }

    fn cliques_in(&self, candidates: u32, k: usize) -> u64 {
        if k == 0 {
            return 1;
        }
        let mut total = 0;
        let mut rest = candidates;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            // extend only with higher-indexed neighbours to count each once
            total += self.cliques_in(rest & self.adj[v], k - 1);
        }
        total
    }

    /// Maximum number of edge-disjoint s-t paths inside `mask`, by
    /// augmenting along BFS paths in a unit-capacity residual matrix.
    pub fn edge_disjoint_paths(&self, mask: u32, s: usize, t: usize) -> u32 {
        let n = self.node_count();
        let mut cap = vec![vec![0i32; n]; n];
        for u in Self::members(mask) {
            for v in Self::members(self.adj[u] & mask) {
                cap[u][v] = 1;
            }
        }
        let mut flow = 0;
        loop {
            let mut parent = vec![usize::MAX; n];
            parent[s] = s;
            let mut queue = std::collections::VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for v in Self::members(mask) {
                    if parent[v] == usize::MAX && cap[u][v] > 0 {
                        parent[v] = u;
                        queue.push_back(v);
                    }
                }
            }
            if parent[t] == usize::MAX {
                return flow;
            }
            let mut v = t;
            while v != s {
                let u = parent[v];
                cap[u][v] -= 1;
                cap[v][u] += 1;
                v = u;
            }
            flow += 1;
        }
    }

    /// Edge connectivity of the subgraph induced by `mask` (0 for fewer
    /// than two nodes): min over t of the edge-disjoint path count between
    /// the lowest node and t.
    pub fn lambda(&self, mask: u32) -> u32 {
        if mask.count_ones() < 2 {
            return 0;
        }
        let s = mask.trailing_zeros() as usize;
        Self::members(mask).filter(|&t| t != s).map(|t| self.edge_disjoint_paths(mask, s, t)).min().unwrap_or(0)
    }

    pub fn eval_leaf(&self, m: Measure, mask: u32) -> DensityValue {
        let n = mask.count_ones() as i64;
        assert!(n > 0, "empty subset");
        match m {
            Measure::EdgeDensity => DensityValue::new(self.edges_in(mask) as i64, n),
            Measure::MinDegree => DensityValue::integer(Self::members(mask).map(|v| self.degree_in(v, mask)).min().unwrap_or(0) as i64),
            Measure::KCliqueDensity(k) => DensityValue::new(self.cliques_in(mask, k) as i64, n),
            Measure::SquaredDegree => {
                let sum: u32 = Self::members(mask).map(|v| self.degree_in(v, mask).pow(2)).sum();
                DensityValue::new(sum as i64, n)
            }
            Measure::EdgeConnectivity => DensityValue::integer(self.lambda(mask) as i64),
        }
    }

    pub fn eval(&self, m: &MeasureExpr, mask: u32) -> DensityValue {
        match m {
            MeasureExpr::Leaf(leaf) => self.eval_leaf(*leaf, mask),
            MeasureExpr::Min(c) => c.iter().map(|e| self.eval(e, mask)).min().expect("non-empty"),
            MeasureExpr::Max(c) => c.iter().map(|e| self.eval(e, mask)).max().expect("non-empty"),
        }
    }

    pub fn is_clique(&self, mask: u32) -> bool {
        Self::members(mask).all(|v| (self.adj[v] | (1 << v)) & mask == mask)
    }
}

fn mask_to_set(mask: u32) -> SubgraphRef {
    (0..32).filter(|i| mask & (1 << i) != 0).map(NodeId).collect()
}

/// Measure values of every non-empty node subset, indexed by bitmask
/// (entry 0 is unused).
pub fn subset_values(g: &Graph, m: &MeasureExpr) -> Result<Vec<DensityValue>> {
    check_size(g, MAX_SUBSET_NODES)?;
    validate_for_oracle(m)?;
    let mg = MaskGraph::new(g);
    let total = 1u32 << g.node_count();
    let mut out = Vec::with_capacity(total as usize);
    out.push(DensityValue::ZERO);
    for mask in 1..total {
        out.push(mg.eval(m, mask));
    }
    Ok(out)
}

fn validate_for_oracle(m: &MeasureExpr) -> Result<()> {
    m.validate().map_err(|e| match e {
        Error::CliqueSizeOutOfRange { k, .. } => Error::CliqueSizeOutOfRange { k, max: MAX_CLIQUE_K },
        other => other,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// A qualifying subgraph's node is absent from the fast cover (unsound).
    MissingFromCover,
    /// The fast cover holds a node of no qualifying subgraph.
    ExtraInCover,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Discrepancy {
    pub node: String,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub instance: String,
    /// Every qualifying node set with its density, in set order.
    pub qualifying: Vec<(SubgraphRef, DensityValue)>,
    /// Union of the qualifying sets.
    pub cover: SubgraphRef,
    pub discrepancies: Vec<Discrepancy>,
}

impl OracleReport {
    pub fn is_sound(&self) -> bool {
        self.discrepancies.iter().all(|d| d.direction != Direction::MissingFromCover)
    }

    /// Records differences between this exhaustive cover and a fast cover
    /// over the same graph.
    pub fn compare(&mut self, g: &Graph, fast: &DenseCover) {
        let mut out = Vec::new();
        for v in self.cover.difference(&fast.cover).iter() {
            out.push(Discrepancy { node: g.label(v).to_string(), direction: Direction::MissingFromCover });
        }
        for v in fast.cover.difference(&self.cover).iter() {
            out.push(Discrepancy { node: g.label(v).to_string(), direction: Direction::ExtraInCover });
        }
        self.discrepancies = out;
    }

    /// Whether a fast cover passes: always sound, and equal when it claims
    /// exactness.
    pub fn accepts(&self, exactness: Exactness) -> bool {
        self.is_sound() && (exactness == Exactness::OverApproximate || self.discrepancies.is_empty())
    }

    pub fn to_json(&self, g: &Graph) -> serde_json::Value {
        let labels = |s: &SubgraphRef| s.iter().map(|v| g.label(v).to_string()).collect::<Vec<_>>();
        serde_json::json!({
            "instance": self.instance,
            "qualifying": self.qualifying.iter().map(|(s, d)| serde_json::json!({
                "nodes": labels(s),
                "density": d,
            })).collect::<Vec<_>>(),
            "qualifying_count": self.qualifying.len(),
            "exact_cover": labels(&self.cover),
            "discrepancies": self.discrepancies,
            "sound": self.is_sound(),
        })
    }
}

/// Every node subset of `g` whose induced subgraph has `m >= rho0`.
pub fn enumerate_dense(g: &Graph, m: &MeasureExpr, rho0: DensityValue, max_nodes: usize) -> Result<OracleReport> {
    check_size(g, max_nodes.min(MAX_SUBSET_NODES))?;
    let values = subset_values(g, m)?;
    Ok(report_from_values(g, m, rho0, &values))
}

/// Builds a report from precomputed [`subset_values`].
pub fn report_from_values(g: &Graph, m: &MeasureExpr, rho0: DensityValue, values: &[DensityValue]) -> OracleReport {
    let mut qualifying = Vec::new();
    let mut union = 0u32;
    for (mask, &v) in values.iter().enumerate().skip(1) {
        if v >= rho0 {
            union |= mask as u32;
            qualifying.push((mask_to_set(mask as u32), v));
        }
    }
    qualifying.sort_by(|a, b| a.0.cmp(&b.0));
    OracleReport {
        instance: format!("{} nodes, {} edges, measure {m}, rho0 {rho0}", g.node_count(), g.edge_count()),
        qualifying,
        cover: mask_to_set(union),
        discrepancies: Vec::new(),
    }
}

/// Union of node sets with `m >= rho0`, from precomputed values.
pub fn qualifying_union(values: &[DensityValue], rho0: DensityValue) -> u32 {
    values.iter().enumerate().skip(1).filter(|(_, &v)| v >= rho0).fold(0u32, |acc, (mask, _)| acc | mask as u32)
}

/// Minimum simple `s`-`t` path avoiding `forbidden`, by enumerating every
/// simple path. Ties go to fewer hops, then to the lexicographically
/// smallest node sequence.
pub fn brute_force_shortest_path(g: &Graph, weights: &[f64], s: NodeId, t: NodeId, forbidden: &SubgraphRef) -> Result<Option<Path>> {
    check_size(g, MAX_PATH_NODES)?;
    if forbidden.contains(s) || forbidden.contains(t) {
        return Ok(None);
    }
    let mut best: Option<Path> = None;
    let mut stack = vec![s];
    let mut on_path = vec![false; g.node_count()];
    on_path[s.0] = true;
    #[allow(clippy::too_many_arguments)]
    fn walk(
        g: &Graph,
        weights: &[f64],
        t: NodeId,
        forbidden: &SubgraphRef,
        stack: &mut Vec<NodeId>,
        on_path: &mut [bool],
        weight: f64,
        best: &mut Option<Path>,
    ) {
        let u = *stack.last().expect("non-empty");
        if u == t {
            let better = match best {
                None => true,
                Some(b) => (weight, stack.len(), stack.as_slice()) < (b.weight, b.nodes.len(), b.nodes.as_slice()),
            };
            if better {
                *best = Some(Path { nodes: stack.clone(), weight });
            }
            return;
        }
        // weights are non-negative, so a prefix already worse cannot win
        if best.as_ref().is_some_and(|b| weight > b.weight) {
            return;
        }
        for &v in g.neighbors(u) {
            if on_path[v.0] || forbidden.contains(v) {
                continue;
            }
            let w = weights[g.edge_id(u, v).expect("adjacent")];
            on_path[v.0] = true;
            stack.push(v);
            walk(g, weights, t, forbidden, stack, on_path, weight + w, best);
            stack.pop();
            on_path[v.0] = false;
        }
    }
    walk(g, weights, t, forbidden, &mut stack, &mut on_path, 0.0, &mut best);
    Ok(best)
}

/// Exhaustive answer to the density-index routing task: the nodes of every
/// qualifying subgraph of the congested core are forbidden, and the best
/// remaining simple path is returned.
pub fn brute_force_cap(
    g: &LoadedGraph,
    threshold: f64,
    m: &MeasureExpr,
    rho0: DensityValue,
    s: NodeId,
    t: NodeId,
    policy: WeightPolicy,
) -> Result<RouteOutcome> {
    check_size(g.graph(), MAX_PATH_NODES)?;
    if s == t {
        return Err(Error::SameEndpoints);
    }
    let core = congested_core(g, threshold)?;
    let report = enumerate_dense(&core.core, m, rho0, MAX_SUBSET_NODES)?;
    let forbidden = core.to_original(&report.cover);
    if forbidden.contains(s) || forbidden.contains(t) {
        return Ok(RouteOutcome::NoPath { reason: NoPathReason::EndpointRemoved, certified: true });
    }
    let weights = policy.weights(g);
    Ok(match brute_force_shortest_path(g.graph(), &weights, s, t, &forbidden)? {
        Some(p) => RouteOutcome::Found(p),
        None => RouteOutcome::NoPath { reason: NoPathReason::Disconnected, certified: true },
    })
}

/// Exhaustive density index: the smallest candidate guard such that no
/// qualifying subgraph of the core meets the path.
pub fn brute_force_density_index(
    g: &LoadedGraph,
    threshold: f64,
    m: &MeasureExpr,
    path: &[NodeId],
    grid: &[DensityValue],
) -> Result<DensityValue> {
    let core = congested_core(g, threshold)?;
    let values = subset_values(&core.core, m)?;
    let on_path: SubgraphRef = path.iter().copied().collect();
    let mut path_mask = 0u32;
    for (i, v) in core.origin.iter().enumerate() {
        if on_path.contains(*v) {
            path_mask |= 1 << i;
        }
    }
    // largest density among subsets meeting the path
    let touching = values.iter().enumerate().skip(1).filter(|(mask, _)| *mask as u32 & path_mask != 0).map(|(_, &v)| v).max();
    Ok(match touching {
        None => DensityValue::ZERO,
        Some(top) => grid
            .iter()
            .copied()
            .find(|&r| r > top)
            .ok_or_else(|| Error::InvalidParameter("grid does not exceed the maximum density".into()))?,
    })
}

/// Maximum clique size by subset enumeration, largest subsets first.
pub fn brute_force_clique_number(g: &Graph) -> Result<usize> {
    check_size(g, MAX_SUBSET_NODES)?;
    let mg = MaskGraph::new(g);
    let n = g.node_count();
    let mut best = 0usize;
    for mask in 1u32..(1u32 << n) {
        let size = mask.count_ones() as usize;
        if size > best && mg.is_clique(mask) {
            best = size;
        }
    }
    Ok(best)
}

/// Edge connectivity of the whole graph via Menger path counting.
pub fn brute_force_lambda(g: &Graph) -> u32 {
    assert!(g.node_count() <= 32);
    let mg = MaskGraph::new(g);
    let all = if g.node_count() == 32 { u32::MAX } else { (1u32 << g.node_count()) - 1 };
    mg.lambda(all)
}
